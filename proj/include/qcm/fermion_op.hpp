#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "qcm/integrals.hpp"
#include "qcm/util.hpp"

namespace qcm {

/// A normal-ordered product of creation/annihilation operators, identified by
/// two mode bitsets. The operator it denotes is
///     a+_{c1} ... a+_{cm} a_{d1} ... a_{dn}
/// with creation modes c1 < c2 < ... (ascending) and annihilation modes
/// d1 > d2 > ... (descending). Because no mode repeats within a block, the two
/// bitsets determine the term completely.
struct FermTerm {
    uint64_t cre = 0;
    uint64_t ann = 0;
    bool operator==(const FermTerm&) const = default;
    bool operator<(const FermTerm& o) const {
        return cre != o.cre ? cre < o.cre : ann < o.ann;
    }
};

struct FermTermHash {
    size_t operator()(const FermTerm& t) const {
        return splitmix64(t.cre * 0x9e3779b97f4a7c15ULL ^ splitmix64(t.ann));
    }
};

/// Second-quantized operator over a fixed number of fermionic modes, stored
/// as a coefficient map over normal-ordered terms. Coefficients below
/// drop_tolerance() are removed on every mutation.
class FermionOperator {
  public:
    FermionOperator() = default;
    explicit FermionOperator(int n_modes) : n_modes_(n_modes) {}

    static double drop_tolerance() { return 1e-12; }

    int n_modes() const { return n_modes_; }
    size_t n_terms() const { return terms_.size(); }
    bool empty() const { return terms_.empty(); }

    void add(const FermTerm& t, cplx coeff);
    void add_constant(cplx c) { add(FermTerm{}, c); }
    cplx constant() const;
    cplx coefficient(const FermTerm& t) const;

    FermionOperator adjoint() const;
    FermionOperator scaled(cplx factor) const;
    FermionOperator plus(const FermionOperator& other) const;

    /// Terms in a fixed (sorted) order; use for any iteration whose float
    /// summation order or output must be deterministic.
    std::vector<std::pair<FermTerm, cplx>> sorted_terms() const;

    const std::unordered_map<FermTerm, cplx, FermTermHash>& terms() const { return terms_; }

    /// Largest distance (term-wise max |coeff| difference) to another operator.
    double max_coeff_diff(const FermionOperator& other) const;

    /// One term per line: "re im  ops" where ops are mode indices, '^' marks
    /// creation, creations first. The constant term has an empty op list.
    std::string dump() const;
    static FermionOperator parse_dump(const std::string& text, int n_modes);

  private:
    int n_modes_ = 0;
    std::unordered_map<FermTerm, cplx, FermTermHash> terms_;
};

/// Operator-valued coefficients of (H + lambda*mu)^p collected by power of
/// lambda: coeffs[k] is C_{p,k}, so the polynomial is sum_k lambda^k coeffs[k].
struct LambdaPolyOperator {
    int degree = 0;
    std::vector<FermionOperator> coeffs;
};

/// Normal-ordered product a*b. If max_annihilators is set, output terms whose
/// annihilation block exceeds it are dropped; this leaves expectation values
/// on states of at most max_annihilators particles unchanged.
FermionOperator wick_multiply(const FermionOperator& a, const FermionOperator& b,
                              std::optional<int> max_annihilators = std::nullopt);

LambdaPolyOperator lambda_power(const FermionOperator& h, const FermionOperator& mu, int p,
                                std::optional<int> max_annihilators = std::nullopt);

/// Partial expectation of op over a product occupation state on the frozen
/// modes. Active modes are relabeled contiguously, preserving their order
/// (active mode m maps to m minus the number of frozen modes below m).
FermionOperator freeze_modes(const FermionOperator& op, const std::map<int, int>& frozen);

/// Eq.-1-form spin-orbital Hamiltonian. Spatial orbital p becomes modes 2p
/// (alpha) and 2p+1 (beta); the chemists' integrals are antisymmetrized into
/// normal-ordered two-body terms at build time.
FermionOperator build_hamiltonian(const MolecularIntegrals& mi);

/// One-body dipole operator including the d_core constant.
FermionOperator build_dipole(const DipoleIntegrals& di);

FermionOperator number_operator(int n_modes);

}  // namespace qcm

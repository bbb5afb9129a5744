#pragma once

#include <array>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>

#include "qcm/fermion_op.hpp"
#include "qcm/pauli.hpp"
#include "qcm/state.hpp"

namespace qcm {

enum class Provenance { exact, sampled };
enum class StateLabel { trial, reference };

constexpr int kMaxMomentOrder = 4;

/// Number of (p,k) coefficient slots for p in 1..4, k in 0..p.
constexpr int kNumCoefficients = 14;

/// Flat index of coefficient (p,k); p in 1..4, k in 0..p.
constexpr int pk_index(int p, int k) { return p * (p + 1) / 2 - 1 + k; }

/// Expectations T[p][k] of the operator-valued lambda^k coefficients of
/// (H + lambda*mu)^p. T[1][0] = <H>, T[1][1] = <mu>.
struct CoefficientTable {
    std::array<double, kNumCoefficients> values{};
    Provenance provenance = Provenance::exact;
    StateLabel state = StateLabel::trial;

    double at(int p, int k) const { return values[pk_index(p, k)]; }
    double& at(int p, int k) { return values[pk_index(p, k)]; }
};

/// Numeric moments m_p = <H_lambda^p> at a fixed lambda.
struct MomentSet {
    std::array<double, kMaxMomentOrder + 1> m{};  // m[1..4]
    double lambda = 0.0;
    bool truncated = false;
};

/// The seven vectors from which every expectation of a product of at most
/// four factors from {H, mu} is an inner product.
struct KrylovVectors {
    StateVector psi, h_psi, mu_psi, hh_psi, hmu_psi, muh_psi, mumu_psi;
};

KrylovVectors krylov_vectors(const PauliSum& h, const PauliSum& mu, const StateVector& state);

/// <O_1 ... O_p> for the word given by bits (bit t set = factor t is mu,
/// clear = H), factors indexed left to right. Length-3 words split as
/// <(prefix 1)psi|(suffix 2)psi>, length-4 words split 2+2.
cplx krylov_word_expectation(const KrylovVectors& kv, unsigned word_bits, int length);

/// Coefficient table via Krylov inner products; no operator powers formed.
CoefficientTable krylov_coefficient_table(const PauliSum& h, const PauliSum& mu,
                                          const StateVector& state);

/// The (p,k) coefficient operators of the measurement pipeline: fermionic
/// lambda powers in the full space, frozen-mode reduction, Jordan-Wigner.
/// Index with pk_index. With an empty frozen map this is the plain active
/// space operator set.
std::array<PauliSum, kNumCoefficients> coefficient_operators(
    const FermionOperator& h, const FermionOperator& mu, const std::map<int, int>& frozen,
    std::optional<int> max_annihilators = std::nullopt,
    std::optional<int> post_freeze_max_annihilators = std::nullopt);

/// Coefficient table via operator powers + moment-level freezing, evaluated
/// on a state over the active (post-freezing) modes.
CoefficientTable paper_pipeline_table(const FermionOperator& h, const FermionOperator& mu,
                                      const std::map<int, int>& frozen, const StateVector& state,
                                      std::optional<int> max_annihilators = std::nullopt);

/// m_p(lambda) = sum_k lambda^k T[p][k]; the truncated form stops at k = 1.
/// Accumulated in extended precision, k ascending.
MomentSet assemble_moments(const CoefficientTable& table, double lambda, bool truncate = false);

/// m_1(+d) - m_1(-d) evaluated in extended precision (diagnostic for the
/// exact linearity identity).
long double moment1_difference(const CoefficientTable& table, double delta);

/// Numeric-lambda route: substitute lambda before taking Wick powers, then
/// take expectations. Matches assemble_moments output on the same state.
MomentSet direct_lambda_moments(const FermionOperator& h, const FermionOperator& mu,
                                double lambda, const StateVector& state,
                                std::optional<int> max_annihilators = std::nullopt);

/// Self-describing text export: one "p k value state provenance" row per entry.
std::string write_table(const CoefficientTable& table);
CoefficientTable read_table(std::istream& in);

}  // namespace qcm

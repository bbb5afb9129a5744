#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "qcm/fermion_op.hpp"
#include "qcm/util.hpp"

namespace qcm {

/// An n-qubit Pauli word in packed symplectic form: qubit q carries
/// X if only x-bit q is set, Z if only z-bit q, Y if both, I if neither.
/// The word denotes the Hermitian product of those single-qubit letters.
struct PauliWord {
    uint64_t x = 0;
    uint64_t z = 0;
    bool operator==(const PauliWord&) const = default;
    bool operator<(const PauliWord& o) const { return x != o.x ? x < o.x : z < o.z; }
    uint64_t support() const { return x | z; }
    bool is_identity() const { return x == 0 && z == 0; }
    char letter(int q) const {
        int code = static_cast<int>(x >> q & 1) | static_cast<int>(z >> q & 1) << 1;
        return "IXZY"[code];
    }
};

struct PauliWordHash {
    size_t operator()(const PauliWord& w) const {
        return splitmix64(w.x * 0x9e3779b97f4a7c15ULL ^ splitmix64(w.z));
    }
};

/// Product of two Pauli words: a*b = i^phase * word. phase is mod 4.
inline std::pair<PauliWord, int> word_product(const PauliWord& a, const PauliWord& b) {
    PauliWord c{a.x ^ b.x, a.z ^ b.z};
    int k = popcount64(a.x & a.z) + popcount64(b.x & b.z) - popcount64(c.x & c.z) +
            2 * popcount64(a.z & b.x);
    return {c, ((k % 4) + 4) % 4};
}

inline cplx phase_factor(int k) {
    static const cplx tab[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    return tab[k & 3];
}

/// Qubit operator as a coefficient map over Pauli words.
class PauliSum {
  public:
    PauliSum() = default;
    explicit PauliSum(int n_qubits) : n_qubits_(n_qubits) {}

    static double drop_tolerance() { return 1e-12; }

    int n_qubits() const { return n_qubits_; }
    size_t n_terms() const { return terms_.size(); }

    void add(const PauliWord& w, cplx coeff);
    cplx coefficient(const PauliWord& w) const;

    PauliSum scaled(cplx factor) const;
    PauliSum plus(const PauliSum& other) const;
    PauliSum times(const PauliSum& other) const;

    /// Largest |imaginary part| over all coefficients; zero (to tolerance)
    /// for the encoding of any Hermitian operator.
    double max_imag() const;

    std::vector<std::pair<PauliWord, cplx>> sorted_terms() const;
    const std::unordered_map<PauliWord, cplx, PauliWordHash>& terms() const { return terms_; }

    std::string word_string(const PauliWord& w) const;
    std::string dump() const;  // "re im word" per line

  private:
    int n_qubits_ = 0;
    std::unordered_map<PauliWord, cplx, PauliWordHash> terms_;
};

/// Standard Jordan-Wigner image: a+_j -> (X_j - iY_j)/2 (x) Z-string on
/// modes below j; constants map to the identity word.
PauliSum jordan_wigner(const FermionOperator& op);

/// Identity-word coefficient; equals the maximally-mixed-state expectation
/// Tr(ps)/2^n for a Hermitian sum.
double identity_component(const PauliSum& ps);

struct MeasurementGroup {
    PauliWord basis;                  // per-qubit letter constraints (support = constrained qubits)
    std::vector<uint32_t> members;    // indices into the input word list
};

/// Greedy largest-support-first partition into qubit-wise commuting groups.
/// Deterministic: ties broken lexicographically on the packed words, first-fit
/// assignment in that order.
std::vector<MeasurementGroup> group_qubitwise_commuting(const std::vector<PauliWord>& words);

}  // namespace qcm

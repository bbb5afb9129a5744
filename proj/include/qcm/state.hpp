#pragma once

#include <complex>
#include <vector>

#include "qcm/pauli.hpp"

namespace qcm {

/// Dense state over n qubits. Basis index bit q holds the occupation of mode
/// q (mode 0 is the least significant bit; kets print mode 0 leftmost).
struct StateVector {
    int n_qubits = 0;
    std::vector<cplx> amps;

    StateVector() = default;
    explicit StateVector(int n) : n_qubits(n), amps(size_t(1) << n, cplx(0.0)) {}

    size_t dim() const { return amps.size(); }
    double norm() const;
    std::string ket_string(size_t index) const;  // mode 0 leftmost
};

StateVector hf_state(int n_qubits, const std::vector<int>& occupied);

StateVector apply(const PauliSum& ps, const StateVector& v);

cplx inner(const StateVector& a, const StateVector& b);  // <a|b>

cplx expectation(const PauliSum& ps, const StateVector& v);

/// Expectation of a single Pauli word (no coefficient).
double word_expectation(const PauliWord& w, const StateVector& v);

}  // namespace qcm

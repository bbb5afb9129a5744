#include "qcm/state.hpp"

#include <cmath>
#include <stdexcept>

namespace qcm {

double StateVector::norm() const {
    double s = 0.0;
    for (const cplx& a : amps) s += std::norm(a);
    return std::sqrt(s);
}

std::string StateVector::ket_string(size_t index) const {
    std::string s(n_qubits, '0');
    for (int q = 0; q < n_qubits; ++q)
        if (index >> q & 1) s[q] = '1';
    return s;
}

StateVector hf_state(int n_qubits, const std::vector<int>& occupied) {
    size_t idx = 0;
    for (int m : occupied) {
        if (m < 0 || m >= n_qubits) throw std::runtime_error("hf_state: mode out of range");
        if (idx >> m & 1) throw std::runtime_error("hf_state: duplicate occupied mode");
        idx |= size_t(1) << m;
    }
    StateVector v(n_qubits);
    v.amps[idx] = 1.0;
    return v;
}

StateVector apply(const PauliSum& ps, const StateVector& v) {
    if (ps.n_qubits() != v.n_qubits) throw std::runtime_error("apply: dimension mismatch");
    StateVector out(v.n_qubits);
    const size_t dim = v.dim();
    for (const auto& [w, c] : ps.sorted_terms()) {
        const cplx base = c * phase_factor(popcount64(w.x & w.z));
        for (size_t i = 0; i < dim; ++i) {
            if (v.amps[i] == cplx(0.0)) continue;
            const double sgn = (popcount64(w.z & i) & 1) ? -1.0 : 1.0;
            out.amps[i ^ w.x] += base * sgn * v.amps[i];
        }
    }
    return out;
}

cplx inner(const StateVector& a, const StateVector& b) {
    if (a.n_qubits != b.n_qubits) throw std::runtime_error("inner: dimension mismatch");
    cplx s = 0.0;
    for (size_t i = 0; i < a.dim(); ++i) s += std::conj(a.amps[i]) * b.amps[i];
    return s;
}

namespace {

cplx word_expectation_complex(const PauliWord& w, const StateVector& v) {
    const cplx base = phase_factor(popcount64(w.x & w.z));
    cplx s = 0.0;
    for (size_t i = 0; i < v.dim(); ++i) {
        if (v.amps[i] == cplx(0.0)) continue;
        const double sgn = (popcount64(w.z & i) & 1) ? -1.0 : 1.0;
        s += std::conj(v.amps[i ^ w.x]) * base * sgn * v.amps[i];
    }
    return s;
}

}  // namespace

cplx expectation(const PauliSum& ps, const StateVector& v) {
    cplx s = 0.0;
    for (const auto& [w, c] : ps.sorted_terms()) s += c * word_expectation_complex(w, v);
    return s;
}

double word_expectation(const PauliWord& w, const StateVector& v) {
    return word_expectation_complex(w, v).real();
}

}  // namespace qcm

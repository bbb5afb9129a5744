#include "qcm/pauli.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace qcm {

void PauliSum::add(const PauliWord& w, cplx coeff) {
    auto it = terms_.find(w);
    if (it == terms_.end()) {
        if (std::abs(coeff) > drop_tolerance()) terms_.emplace(w, coeff);
        return;
    }
    it->second += coeff;
    if (std::abs(it->second) <= drop_tolerance()) terms_.erase(it);
}

cplx PauliSum::coefficient(const PauliWord& w) const {
    auto it = terms_.find(w);
    return it == terms_.end() ? cplx(0.0) : it->second;
}

PauliSum PauliSum::scaled(cplx factor) const {
    PauliSum out(n_qubits_);
    for (const auto& [w, c] : terms_) out.add(w, c * factor);
    return out;
}

PauliSum PauliSum::plus(const PauliSum& other) const {
    PauliSum out = *this;
    for (const auto& [w, c] : other.terms_) out.add(w, c);
    return out;
}

PauliSum PauliSum::times(const PauliSum& other) const {
    PauliSum out(n_qubits_);
    for (const auto& [wa, ca] : terms_)
        for (const auto& [wb, cb] : other.terms_) {
            auto [wc, k] = word_product(wa, wb);
            out.add(wc, ca * cb * phase_factor(k));
        }
    return out;
}

double PauliSum::max_imag() const {
    double m = 0.0;
    for (const auto& [w, c] : terms_) m = std::max(m, std::abs(c.imag()));
    return m;
}

std::vector<std::pair<PauliWord, cplx>> PauliSum::sorted_terms() const {
    std::vector<std::pair<PauliWord, cplx>> v(terms_.begin(), terms_.end());
    std::sort(v.begin(), v.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return v;
}

std::string PauliSum::word_string(const PauliWord& w) const {
    std::string s(n_qubits_, 'I');
    for (int q = 0; q < n_qubits_; ++q) s[q] = w.letter(q);
    return s;
}

std::string PauliSum::dump() const {
    std::ostringstream os;
    os.precision(16);
    for (const auto& [w, c] : sorted_terms())
        os << c.real() << " " << c.imag() << " " << word_string(w) << "\n";
    return os.str();
}

PauliSum jordan_wigner(const FermionOperator& op) {
    PauliSum out(op.n_modes());
    std::vector<std::pair<PauliWord, cplx>> acc, next;
    for (const auto& [t, coeff] : op.terms()) {
        acc.assign(1, {PauliWord{}, coeff});
        auto apply_op = [&](int m, bool dagger) {
            const uint64_t mb = uint64_t(1) << m;
            const uint64_t zstr = bits_below(m);
            const PauliWord wx{mb, zstr};
            const PauliWord wy{mb, zstr | mb};
            const cplx cy = dagger ? cplx(0, -0.5) : cplx(0, 0.5);
            next.clear();
            next.reserve(acc.size() * 2);
            for (const auto& [w, c] : acc) {
                auto [w1, k1] = word_product(w, wx);
                next.emplace_back(w1, c * 0.5 * phase_factor(k1));
                auto [w2, k2] = word_product(w, wy);
                next.emplace_back(w2, c * cy * phase_factor(k2));
            }
            acc.swap(next);
        };
        // creations ascending, then annihilations descending: the term's
        // operator order, applied left to right
        for (int m = 0; m < op.n_modes(); ++m)
            if (t.cre >> m & 1) apply_op(m, true);
        for (int m = op.n_modes() - 1; m >= 0; --m)
            if (t.ann >> m & 1) apply_op(m, false);
        for (const auto& [w, c] : acc) out.add(w, c);
    }
    return out;
}

double identity_component(const PauliSum& ps) {
    return ps.coefficient(PauliWord{}).real();
}

std::vector<MeasurementGroup> group_qubitwise_commuting(const std::vector<PauliWord>& words) {
    std::vector<uint32_t> order(words.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
        int sa = popcount64(words[a].support()), sb = popcount64(words[b].support());
        if (sa != sb) return sa > sb;
        return words[a] < words[b];
    });
    std::vector<MeasurementGroup> groups;
    std::vector<uint64_t> gmask;  // constrained qubits per group
    for (uint32_t idx : order) {
        const PauliWord& w = words[idx];
        if (w.is_identity()) continue;  // measured trivially; never grouped
        bool placed = false;
        for (size_t gi = 0; gi < groups.size(); ++gi) {
            uint64_t common = gmask[gi] & w.support();
            if ((((groups[gi].basis.x ^ w.x) | (groups[gi].basis.z ^ w.z)) & common) == 0) {
                groups[gi].basis.x |= w.x;
                groups[gi].basis.z |= w.z;
                gmask[gi] |= w.support();
                groups[gi].members.push_back(idx);
                placed = true;
                break;
            }
        }
        if (!placed) {
            groups.push_back({w, {idx}});
            gmask.push_back(w.support());
        }
    }
    return groups;
}

}  // namespace qcm

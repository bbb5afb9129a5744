#include "qcm/moments.hpp"

#include <cmath>
#include <istream>
#include <sstream>
#include <stdexcept>

namespace qcm {

KrylovVectors krylov_vectors(const PauliSum& h, const PauliSum& mu, const StateVector& state) {
    if (h.n_qubits() != state.n_qubits || mu.n_qubits() != state.n_qubits)
        throw std::runtime_error("krylov_vectors: dimension mismatch");
    KrylovVectors kv;
    kv.psi = state;
    kv.h_psi = apply(h, state);
    kv.mu_psi = apply(mu, state);
    kv.hh_psi = apply(h, kv.h_psi);
    kv.hmu_psi = apply(h, kv.mu_psi);
    kv.muh_psi = apply(mu, kv.h_psi);
    kv.mumu_psi = apply(mu, kv.mu_psi);
    return kv;
}

namespace {

const StateVector& vec1(const KrylovVectors& kv, bool is_mu) {
    return is_mu ? kv.mu_psi : kv.h_psi;
}

// vector for O_a(O_b psi): a applied last
const StateVector& vec2(const KrylovVectors& kv, bool a_is_mu, bool b_is_mu) {
    if (!a_is_mu && !b_is_mu) return kv.hh_psi;
    if (!a_is_mu && b_is_mu) return kv.hmu_psi;
    if (a_is_mu && !b_is_mu) return kv.muh_psi;
    return kv.mumu_psi;
}

}  // namespace

cplx krylov_word_expectation(const KrylovVectors& kv, unsigned word_bits, int length) {
    auto bit = [&](int t) { return (word_bits >> t & 1) != 0; };  // factor t, left to right
    switch (length) {
        case 1:
            return inner(kv.psi, vec1(kv, bit(0)));
        case 2:
            // <O1 O2> = <O1 psi | O2 psi>
            return inner(vec1(kv, bit(0)), vec1(kv, bit(1)));
        case 3:
            // <O1 O2 O3> = <O1 psi | O2 (O3 psi)>
            return inner(vec1(kv, bit(0)), vec2(kv, bit(1), bit(2)));
        case 4:
            // <O1 O2 O3 O4> = <O2 (O1 psi) | O3 (O4 psi)>
            return inner(vec2(kv, bit(1), bit(0)), vec2(kv, bit(2), bit(3)));
        default:
            throw std::runtime_error("krylov_word_expectation: length must be 1..4");
    }
}

CoefficientTable krylov_coefficient_table(const PauliSum& h, const PauliSum& mu,
                                          const StateVector& state) {
    KrylovVectors kv = krylov_vectors(h, mu, state);
    CoefficientTable table;
    table.provenance = Provenance::exact;
    for (int p = 1; p <= kMaxMomentOrder; ++p) {
        std::array<cplx, kMaxMomentOrder + 1> sums{};
        for (unsigned word = 0; word < (1u << p); ++word)
            sums[popcount64(word)] += krylov_word_expectation(kv, word, p);
        for (int k = 0; k <= p; ++k) {
            // reversed words are conjugates, so each sum is real up to roundoff
            if (std::abs(sums[k].imag()) > 1e-9)
                throw std::runtime_error("krylov_coefficient_table: non-real coefficient sum");
            table.at(p, k) = sums[k].real();
        }
    }
    return table;
}

std::array<PauliSum, kNumCoefficients> coefficient_operators(
    const FermionOperator& h, const FermionOperator& mu, const std::map<int, int>& frozen,
    std::optional<int> max_annihilators, std::optional<int> post_freeze_max_annihilators) {
    std::array<PauliSum, kNumCoefficients> out;
    std::vector<FermionOperator> level{h, mu};  // p = 1
    for (int p = 1; p <= kMaxMomentOrder; ++p) {
        for (int k = 0; k <= p; ++k) {
            FermionOperator c = level[k];
            if (!frozen.empty()) c = freeze_modes(c, frozen);
            if (post_freeze_max_annihilators) {
                FermionOperator pruned(c.n_modes());
                for (const auto& [t, z] : c.terms())
                    if (popcount64(t.ann) <= *post_freeze_max_annihilators) pruned.add(t, z);
                c = pruned;
            }
            out[pk_index(p, k)] = jordan_wigner(c);
        }
        if (p == kMaxMomentOrder) break;
        std::vector<FermionOperator> next(p + 2, FermionOperator(h.n_modes()));
        for (int k = 0; k <= p + 1; ++k) {
            if (k <= p) next[k] = wick_multiply(level[k], h, max_annihilators);
            if (k >= 1) next[k] = next[k].plus(wick_multiply(level[k - 1], mu, max_annihilators));
        }
        level = std::move(next);
    }
    return out;
}

CoefficientTable paper_pipeline_table(const FermionOperator& h, const FermionOperator& mu,
                                      const std::map<int, int>& frozen, const StateVector& state,
                                      std::optional<int> max_annihilators) {
    auto ops = coefficient_operators(h, mu, frozen, max_annihilators);
    CoefficientTable table;
    table.provenance = Provenance::exact;
    for (int p = 1; p <= kMaxMomentOrder; ++p)
        for (int k = 0; k <= p; ++k) {
            cplx e = expectation(ops[pk_index(p, k)], state);
            if (std::abs(e.imag()) > 1e-9)
                throw std::runtime_error("paper_pipeline_table: non-real expectation");
            table.at(p, k) = e.real();
        }
    return table;
}

MomentSet assemble_moments(const CoefficientTable& table, double lambda, bool truncate) {
    MomentSet ms;
    ms.lambda = lambda;
    ms.truncated = truncate;
    for (int p = 1; p <= kMaxMomentOrder; ++p) {
        long double acc = 0.0L;
        long double lam_k = 1.0L;
        const int kmax = truncate ? std::min(p, 1) : p;
        for (int k = 0; k <= kmax; ++k) {
            acc += lam_k * static_cast<long double>(table.at(p, k));
            lam_k *= static_cast<long double>(lambda);
        }
        ms.m[p] = static_cast<double>(acc);
    }
    return ms;
}

long double moment1_difference(const CoefficientTable& table, double delta) {
    const long double t0 = table.at(1, 0), t1 = table.at(1, 1);
    const long double d = delta;
    return (t0 + d * t1) - (t0 - d * t1);
}

MomentSet direct_lambda_moments(const FermionOperator& h, const FermionOperator& mu,
                                double lambda, const StateVector& state,
                                std::optional<int> max_annihilators) {
    FermionOperator h_lambda = h.plus(mu.scaled(lambda));
    MomentSet ms;
    ms.lambda = lambda;
    FermionOperator power = h_lambda;
    for (int p = 1; p <= kMaxMomentOrder; ++p) {
        if (p > 1) power = wick_multiply(power, h_lambda, max_annihilators);
        cplx e = expectation(jordan_wigner(power), state);
        ms.m[p] = e.real();
    }
    return ms;
}

std::string write_table(const CoefficientTable& table) {
    std::ostringstream os;
    os.precision(17);
    os << "# p k value state provenance\n";
    for (int p = 1; p <= kMaxMomentOrder; ++p)
        for (int k = 0; k <= p; ++k)
            os << p << " " << k << " " << table.at(p, k) << " "
               << (table.state == StateLabel::trial ? "trial" : "reference") << " "
               << (table.provenance == Provenance::exact ? "exact" : "sampled") << "\n";
    return os.str();
}

CoefficientTable read_table(std::istream& in) {
    CoefficientTable table;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        std::istringstream ls(t);
        int p, k;
        double v;
        std::string state, prov;
        if (!(ls >> p >> k >> v >> state >> prov)) throw ParseError("bad table row", lineno);
        if (p < 1 || p > kMaxMomentOrder || k < 0 || k > p)
            throw ParseError("table indices out of range", lineno);
        table.at(p, k) = v;
        table.state = (state == "reference") ? StateLabel::reference : StateLabel::trial;
        table.provenance = (prov == "sampled") ? Provenance::sampled : Provenance::exact;
    }
    return table;
}

}  // namespace qcm

#include "qcm/fermion_op.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qcm {

void FermionOperator::add(const FermTerm& t, cplx coeff) {
    auto it = terms_.find(t);
    if (it == terms_.end()) {
        if (std::abs(coeff) > drop_tolerance()) terms_.emplace(t, coeff);
        return;
    }
    it->second += coeff;
    if (std::abs(it->second) <= drop_tolerance()) terms_.erase(it);
}

cplx FermionOperator::constant() const { return coefficient(FermTerm{}); }

cplx FermionOperator::coefficient(const FermTerm& t) const {
    auto it = terms_.find(t);
    return it == terms_.end() ? cplx(0.0) : it->second;
}

FermionOperator FermionOperator::adjoint() const {
    // (a+[C] a[A])^dagger = a+[A] a[C]; the canonical orderings of both blocks
    // reverse consistently, so no sign appears.
    FermionOperator out(n_modes_);
    for (const auto& [t, c] : terms_) out.add(FermTerm{t.ann, t.cre}, std::conj(c));
    return out;
}

FermionOperator FermionOperator::scaled(cplx factor) const {
    FermionOperator out(n_modes_);
    for (const auto& [t, c] : terms_) out.add(t, c * factor);
    return out;
}

FermionOperator FermionOperator::plus(const FermionOperator& other) const {
    FermionOperator out = *this;
    for (const auto& [t, c] : other.terms_) out.add(t, c);
    return out;
}

std::vector<std::pair<FermTerm, cplx>> FermionOperator::sorted_terms() const {
    std::vector<std::pair<FermTerm, cplx>> v(terms_.begin(), terms_.end());
    std::sort(v.begin(), v.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return v;
}

double FermionOperator::max_coeff_diff(const FermionOperator& other) const {
    double m = 0.0;
    for (const auto& [t, c] : terms_) m = std::max(m, std::abs(c - other.coefficient(t)));
    for (const auto& [t, c] : other.terms_) m = std::max(m, std::abs(c - coefficient(t)));
    return m;
}

std::string FermionOperator::dump() const {
    std::ostringstream os;
    os.precision(16);
    for (const auto& [t, c] : sorted_terms()) {
        os << c.real() << " " << c.imag() << " ";
        for (int m = 0; m < n_modes_; ++m)
            if (t.cre >> m & 1) os << " " << m << "^";
        for (int m = n_modes_ - 1; m >= 0; --m)
            if (t.ann >> m & 1) os << " " << m;
        os << "\n";
    }
    return os.str();
}

FermionOperator FermionOperator::parse_dump(const std::string& text, int n_modes) {
    FermionOperator out(n_modes);
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        std::istringstream ls(t);
        double re, im;
        if (!(ls >> re >> im)) throw ParseError("bad operator dump line", lineno);
        FermTerm term;
        std::string op;
        while (ls >> op) {
            bool dag = op.back() == '^';
            int mode = std::stoi(dag ? op.substr(0, op.size() - 1) : op);
            if (mode < 0 || mode >= n_modes) throw ParseError("mode out of range", lineno);
            (dag ? term.cre : term.ann) |= uint64_t(1) << mode;
        }
        out.add(term, cplx(re, im));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Wick product.
//
// For term1 = a+[C1] a[A1] and term2 = a+[C2] a[A2], the middle block
// a[A1] a+[C2] is normal-ordered by processing A1's operators innermost
// (smallest mode) first. Each operator either contracts against the matching
// creation (if present) or anticommutes through the entire remaining creation
// block. Signs follow from counting crossed operators.

namespace {

struct Partial {
    int sign;
    uint64_t cre_left;   // creations of C2 not yet consumed
    uint64_t ann_passed;  // annihilators that crossed the block
};

}  // namespace

FermionOperator wick_multiply(const FermionOperator& a, const FermionOperator& b,
                              std::optional<int> max_annihilators) {
    if (a.n_modes() != b.n_modes())
        throw std::runtime_error("wick_multiply: operator mode counts differ");
    FermionOperator out(a.n_modes());
    const int max_ann = max_annihilators.value_or(64);

    std::vector<Partial> partials, next;
    for (const auto& [t1, c1] : a.terms()) {
        for (const auto& [t2, c2] : b.terms()) {
            partials.clear();
            partials.push_back({1, t2.cre, 0});
            uint64_t a1 = t1.ann;
            while (a1) {
                int d = __builtin_ctzll(a1);  // innermost annihilator
                a1 &= a1 - 1;
                const uint64_t dbit = uint64_t(1) << d;
                next.clear();
                for (const Partial& p : partials) {
                    if (p.cre_left & dbit) {
                        // contract with the matching creation; crossing the
                        // creations below it
                        int s = p.sign * parity_sign(p.cre_left & bits_below(d));
                        next.push_back({s, p.cre_left & ~dbit, p.ann_passed});
                    }
                    // anticommute through the whole remaining creation block
                    int s = p.sign * ((popcount64(p.cre_left) & 1) ? -1 : 1);
                    next.push_back({s, p.cre_left, p.ann_passed | dbit});
                }
                partials.swap(next);
            }
            const cplx c12 = c1 * c2;
            for (const Partial& p : partials) {
                if (t1.cre & p.cre_left) continue;   // a+ a+ on one mode
                if (p.ann_passed & t2.ann) continue;  // a a on one mode
                uint64_t cre = t1.cre | p.cre_left;
                uint64_t ann = p.ann_passed | t2.ann;
                if (popcount64(ann) > max_ann) continue;
                // merge signs: C1 ++ C2' into ascending order, A1' ++ A2 into
                // descending order
                int sign = p.sign;
                uint64_t rem = p.cre_left;
                while (rem) {
                    int m = __builtin_ctzll(rem);
                    rem &= rem - 1;
                    sign *= parity_sign(t1.cre & ~bits_below(m + 1));
                }
                rem = t2.ann;
                while (rem) {
                    int m = __builtin_ctzll(rem);
                    rem &= rem - 1;
                    sign *= parity_sign(p.ann_passed & bits_below(m));
                }
                out.add(FermTerm{cre, ann}, c12 * static_cast<double>(sign));
            }
        }
    }
    return out;
}

LambdaPolyOperator lambda_power(const FermionOperator& h, const FermionOperator& mu, int p,
                                std::optional<int> max_annihilators) {
    if (h.n_modes() != mu.n_modes())
        throw std::runtime_error("lambda_power: operator mode counts differ");
    if (p < 1 || p > 4) throw std::runtime_error("lambda_power: p must be in 1..4");
    LambdaPolyOperator poly;
    poly.degree = 1;
    poly.coeffs = {h, mu};
    for (int step = 2; step <= p; ++step) {
        std::vector<FermionOperator> next(step + 1, FermionOperator(h.n_modes()));
        for (int k = 0; k <= step; ++k) {
            if (k <= step - 1) next[k] = wick_multiply(poly.coeffs[k], h, max_annihilators);
            if (k >= 1)
                next[k] = next[k].plus(wick_multiply(poly.coeffs[k - 1], mu, max_annihilators));
        }
        poly.degree = step;
        poly.coeffs = std::move(next);
    }
    return poly;
}

FermionOperator freeze_modes(const FermionOperator& op, const std::map<int, int>& frozen) {
    uint64_t fmask = 0, occ_mask = 0;
    for (const auto& [m, occ] : frozen) {
        if (m < 0 || m >= op.n_modes()) throw std::runtime_error("freeze_modes: invalid mode");
        if (occ != 0 && occ != 1) throw std::runtime_error("freeze_modes: occupation must be 0 or 1");
        fmask |= uint64_t(1) << m;
        if (occ) occ_mask |= uint64_t(1) << m;
    }
    const int n_active = op.n_modes() - popcount64(fmask);
    FermionOperator out(n_active);
    for (const auto& [t, c] : op.terms()) {
        uint64_t cf = t.cre & fmask, af = t.ann & fmask;
        if (cf != af) continue;            // unpaired frozen operator: expectation 0
        if (cf & ~occ_mask) continue;      // <a+_f a_f> = 0 on an empty frozen mode
        int sign = 1;
        uint64_t cre = t.cre, ann = t.ann;
        uint64_t pairs = cf;
        while (pairs) {
            int f = __builtin_ctzll(pairs);
            pairs &= pairs - 1;
            const uint64_t fb = uint64_t(1) << f;
            // pull a+_f to the end of the creation block and a_f to the front
            // of the annihilation block; the resulting n_f commutes out
            sign *= parity_sign(cre & ~bits_below(f + 1));
            sign *= parity_sign(ann & ~bits_below(f + 1));
            cre &= ~fb;
            ann &= ~fb;
        }
        // embedding sign of the remaining active operators: each one crosses
        // the occupied frozen modes below it
        uint64_t rem = cre;
        while (rem) {
            int m = __builtin_ctzll(rem);
            rem &= rem - 1;
            sign *= parity_sign(occ_mask & bits_below(m));
        }
        rem = ann;
        while (rem) {
            int m = __builtin_ctzll(rem);
            rem &= rem - 1;
            sign *= parity_sign(occ_mask & bits_below(m));
        }
        // relabel active modes contiguously (order preserving)
        auto relabel = [&](uint64_t mask) {
            uint64_t outm = 0;
            while (mask) {
                int m = __builtin_ctzll(mask);
                mask &= mask - 1;
                outm |= uint64_t(1) << (m - popcount64(fmask & bits_below(m)));
            }
            return outm;
        };
        out.add(FermTerm{relabel(cre), relabel(ann)}, c * static_cast<double>(sign));
    }
    return out;
}

namespace {

// accumulate coeff * a+_{c1} a+_{c2} a_{d1} a_{d2} after canonical reordering
void add_two_body(FermionOperator& op, int c1, int c2, int d1, int d2, double coeff) {
    if (c1 == c2 || d1 == d2) return;
    int sign = 1;
    if (c1 > c2) std::swap(c1, c2), sign = -sign;
    if (d1 < d2) std::swap(d1, d2), sign = -sign;
    FermTerm t;
    t.cre = (uint64_t(1) << c1) | (uint64_t(1) << c2);
    t.ann = (uint64_t(1) << d1) | (uint64_t(1) << d2);
    op.add(t, coeff * sign);
}

}  // namespace

FermionOperator build_hamiltonian(const MolecularIntegrals& mi) {
    const int n = mi.n_orb;
    FermionOperator op(2 * n);
    op.add_constant(mi.e_core);
    for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) {
            double v = mi.h_at(p, q);
            if (v == 0.0) continue;
            for (int s = 0; s < 2; ++s) {
                FermTerm t;
                t.cre = uint64_t(1) << (2 * p + s);
                t.ann = uint64_t(1) << (2 * q + s);
                op.add(t, v);
            }
        }
    for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q)
            for (int r = 0; r < n; ++r)
                for (int s = 0; s < n; ++s) {
                    double v = mi.g_at(p, q, r, s);
                    if (v == 0.0) continue;
                    // 1/2 (pq|rs) sum_{st} a+_{p,s} a+_{r,t} a_{s,t} a_{q,s}
                    for (int sp1 = 0; sp1 < 2; ++sp1)
                        for (int sp2 = 0; sp2 < 2; ++sp2)
                            add_two_body(op, 2 * p + sp1, 2 * r + sp2, 2 * s + sp2, 2 * q + sp1,
                                         0.5 * v);
                }
    return op;
}

FermionOperator build_dipole(const DipoleIntegrals& di) {
    const int n = di.n_orb;
    FermionOperator op(2 * n);
    op.add_constant(di.d_core);
    for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) {
            double v = di.f_at(p, q);
            if (v == 0.0) continue;
            for (int s = 0; s < 2; ++s) {
                FermTerm t;
                t.cre = uint64_t(1) << (2 * p + s);
                t.ann = uint64_t(1) << (2 * q + s);
                op.add(t, v);
            }
        }
    return op;
}

FermionOperator number_operator(int n_modes) {
    FermionOperator op(n_modes);
    for (int m = 0; m < n_modes; ++m) {
        FermTerm t;
        t.cre = t.ann = uint64_t(1) << m;
        op.add(t, 1.0);
    }
    return op;
}

}  // namespace qcm

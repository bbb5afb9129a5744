#include "qcm/selfcheck.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "qcm/lanczos.hpp"
#include "qcm/moments.hpp"

namespace qcm::check {

namespace {

// apply one ladder operator to a basis state; returns false if annihilated
bool apply_ladder(uint64_t& bits, int mode, bool dagger, int& sign) {
    const uint64_t mb = uint64_t(1) << mode;
    if (dagger ? (bits & mb) : !(bits & mb)) return false;
    sign *= parity_sign(bits & bits_below(mode));
    bits ^= mb;
    return true;
}

}  // namespace

Eigen::MatrixXcd dense_fermion(const FermionOperator& op) {
    const size_t dim = size_t(1) << op.n_modes();
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
    for (const auto& [t, c] : op.sorted_terms()) {
        for (size_t b = 0; b < dim; ++b) {
            uint64_t bits = b;
            int sign = 1;
            bool alive = true;
            // rightmost operator acts first: annihilations ascending from the
            // innermost (smallest mode), then creations descending
            for (int mo = 0; mo < op.n_modes() && alive; ++mo)
                if (t.ann >> mo & 1) alive = apply_ladder(bits, mo, false, sign);
            for (int mo = op.n_modes() - 1; mo >= 0 && alive; --mo)
                if (t.cre >> mo & 1) alive = apply_ladder(bits, mo, true, sign);
            if (alive) m(bits, b) += c * static_cast<double>(sign);
        }
    }
    return m;
}

Eigen::MatrixXcd dense_pauli(const PauliSum& ps) {
    const int n = ps.n_qubits();
    const size_t dim = size_t(1) << n;
    Eigen::Matrix2cd I2 = Eigen::Matrix2cd::Identity();
    Eigen::Matrix2cd X, Y, Z;
    X << 0, 1, 1, 0;
    Y << cplx(0, 0), cplx(0, -1), cplx(0, 1), cplx(0, 0);
    Z << 1, 0, 0, -1;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
    for (const auto& [w, c] : ps.sorted_terms()) {
        Eigen::MatrixXcd acc = Eigen::MatrixXcd::Ones(1, 1);
        for (int q = 0; q < n; ++q) {
            const Eigen::Matrix2cd* letter = &I2;
            switch (w.letter(q)) {
                case 'X': letter = &X; break;
                case 'Y': letter = &Y; break;
                case 'Z': letter = &Z; break;
                default: break;
            }
            // qubit q varies fastest: new = kron(letter, acc)
            Eigen::MatrixXcd next(acc.rows() * 2, acc.cols() * 2);
            for (int r = 0; r < 2; ++r)
                for (int s = 0; s < 2; ++s) next.block(r * acc.rows(), s * acc.cols(),
                                                       acc.rows(), acc.cols()) =
                    (*letter)(r, s) * acc;
            acc = std::move(next);
        }
        m += c * acc;
    }
    return m;
}

Eigen::VectorXcd dense_state(const StateVector& v) {
    Eigen::VectorXcd out(v.dim());
    for (size_t i = 0; i < v.dim(); ++i) out[static_cast<Eigen::Index>(i)] = v.amps[i];
    return out;
}

Eigen::MatrixXcd project_frozen(const Eigen::MatrixXcd& m, int n_modes,
                                const std::map<int, int>& frozen) {
    uint64_t fmask = 0, fbits = 0;
    for (const auto& [mode, occ] : frozen) {
        fmask |= uint64_t(1) << mode;
        if (occ) fbits |= uint64_t(1) << mode;
    }
    std::vector<int> active;
    for (int mo = 0; mo < n_modes; ++mo)
        if (!(fmask >> mo & 1)) active.push_back(mo);
    const size_t adim = size_t(1) << active.size();
    auto embed = [&](size_t a) {
        uint64_t full = fbits;
        for (size_t i = 0; i < active.size(); ++i)
            if (a >> i & 1) full |= uint64_t(1) << active[i];
        return full;
    };
    Eigen::MatrixXcd out(adim, adim);
    for (size_t r = 0; r < adim; ++r)
        for (size_t c = 0; c < adim; ++c) out(r, c) = m(embed(r), embed(c));
    return out;
}

FermionOperator random_two_body(int n_modes, uint64_t seed, bool hermitian) {
    std::mt19937_64 rng(stream_seed(seed, 0xf0f0));
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_int_distribution<int> mode(0, n_modes - 1);
    std::uniform_int_distribution<int> nops(1, 2);
    FermionOperator op(n_modes);
    op.add_constant(0.25 * u(rng));
    const int n_terms = 4 + n_modes;
    for (int t = 0; t < n_terms; ++t) {
        FermTerm term;
        int nc = nops(rng), na = nops(rng);
        for (int i = 0; i < nc; ++i) term.cre |= uint64_t(1) << mode(rng);
        for (int i = 0; i < na; ++i) term.ann |= uint64_t(1) << mode(rng);
        cplx c(u(rng), u(rng));
        op.add(term, c);
        if (hermitian) op.add(FermTerm{term.ann, term.cre}, std::conj(c));
    }
    return op;
}

int min_group_count(const std::vector<PauliWord>& words) {
    std::vector<PauliWord> ws;
    for (const PauliWord& w : words)
        if (!w.is_identity()) ws.push_back(w);
    int best = static_cast<int>(ws.size());
    // branch and bound over assignments in input order
    struct G {
        PauliWord basis;
        uint64_t mask;
    };
    std::vector<G> groups;
    auto rec = [&](auto&& self, size_t i) -> void {
        if (static_cast<int>(groups.size()) >= best) return;
        if (i == ws.size()) {
            best = static_cast<int>(groups.size());
            return;
        }
        const PauliWord& w = ws[i];
        for (G& g : groups) {
            uint64_t common = g.mask & w.support();
            if ((((g.basis.x ^ w.x) | (g.basis.z ^ w.z)) & common) == 0) {
                G saved = g;
                g.basis.x |= w.x;
                g.basis.z |= w.z;
                g.mask |= w.support();
                self(self, i + 1);
                g = saved;
            }
        }
        groups.push_back({w, w.support()});
        self(self, i + 1);
        groups.pop_back();
    };
    rec(rec, 0);
    return best;
}

namespace {

void check(std::vector<CheckResult>& out, const std::string& name, double err, double tol) {
    std::ostringstream os;
    os << "max error " << err << " (tol " << tol << ")";
    out.push_back({name, err <= tol, os.str()});
}

}  // namespace

std::vector<CheckResult> run_validation_suite(uint64_t seed) {
    std::vector<CheckResult> results;
    const int n_modes = 4;

    double err_wick = 0.0, err_jw = 0.0, err_freeze = 0.0, err_lambda = 0.0, err_assemble = 0.0;
    for (int rep = 0; rep < 8; ++rep) {
        FermionOperator a = random_two_body(n_modes, stream_seed(seed, 10 + rep));
        FermionOperator b = random_two_body(n_modes, stream_seed(seed, 40 + rep));
        Eigen::MatrixXcd ma = dense_fermion(a), mb = dense_fermion(b);

        FermionOperator ab = wick_multiply(a, b);
        err_wick = std::max(err_wick, (dense_fermion(ab) - ma * mb).cwiseAbs().maxCoeff());

        err_jw = std::max(err_jw, (dense_pauli(jordan_wigner(a)) - ma).cwiseAbs().maxCoeff());

        std::map<int, int> frozen{{0, rep % 2}};
        FermionOperator fa = freeze_modes(a, frozen);
        err_freeze = std::max(err_freeze, (dense_fermion(fa) -
                                           project_frozen(ma, n_modes, frozen))
                                              .cwiseAbs()
                                              .maxCoeff());

        LambdaPolyOperator poly = lambda_power(a, b, 2);
        const double lam = 0.3;
        Eigen::MatrixXcd hl = ma + lam * mb;
        Eigen::MatrixXcd poly_m = dense_fermion(poly.coeffs[0]) +
                                  lam * dense_fermion(poly.coeffs[1]) +
                                  lam * lam * dense_fermion(poly.coeffs[2]);
        err_lambda = std::max(err_lambda, (poly_m - hl * hl).cwiseAbs().maxCoeff());
    }
    check(results, "wick_multiply matches dense product", err_wick, 1e-9);
    check(results, "jordan_wigner matches dense operator", err_jw, 1e-9);
    check(results, "freeze_modes matches dense projection", err_freeze, 1e-9);
    check(results, "lambda_power matches dense (H+lambda*mu)^2", err_lambda, 1e-9);

    // moment assembly vs direct numeric-lambda route on a small Hermitian pair
    {
        FermionOperator h = random_two_body(n_modes, stream_seed(seed, 77));
        FermionOperator mu = random_two_body(n_modes, stream_seed(seed, 78));
        StateVector st = hf_state(n_modes, {0, 1});
        PauliSum hp = jordan_wigner(h), mp = jordan_wigner(mu);
        CoefficientTable table = krylov_coefficient_table(hp, mp, st);
        const double lam = 0.12;
        MomentSet assembled = assemble_moments(table, lam);
        MomentSet direct = direct_lambda_moments(h, mu, lam, st);
        for (int p = 1; p <= kMaxMomentOrder; ++p)
            err_assemble = std::max(err_assemble, std::abs(assembled.m[p] - direct.m[p]));
        check(results, "assembled moments match numeric-lambda route", err_assemble, 1e-9);
    }

    // cumulant sanity: eigenstate moments give back c1 on the degenerate branch
    {
        Cumulants c = cumulants(0.5, 0.25, 0.125, 0.0625);
        LanczosEstimate est = lanczos_energy(c);
        bool ok = est.branch == Branch::degenerate_c2 && std::abs(est.value - 0.5) < 1e-12;
        results.push_back({"eigenstate moments return c1", ok, branch_name(est.branch)});
    }
    return results;
}

}  // namespace qcm::check

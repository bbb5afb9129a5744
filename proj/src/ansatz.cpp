#include "qcm/ansatz.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

namespace qcm {

void AnsatzSpec::validate(int n_modes) const {
    if (thetas.size() != excitations.size())
        throw std::runtime_error("ansatz: theta count does not match excitation count");
    std::set<int> occ(occupied.begin(), occupied.end());
    if (occ.size() != occupied.size()) throw std::runtime_error("ansatz: duplicate occupied mode");
    for (int m : occupied)
        if (m < 0 || m >= n_modes) throw std::runtime_error("ansatz: occupied mode out of range");
    std::set<std::array<int, 4>> seen;
    for (const auto& ex : excitations) {
        auto [i, j, a, b] = ex;
        for (int m : ex)
            if (m < 0 || m >= n_modes) throw std::runtime_error("ansatz: excitation mode out of range");
        if (!(i < j) || !(a < b)) throw std::runtime_error("ansatz: excitation modes must satisfy i<j, a<b");
        if (!occ.count(i) || !occ.count(j))
            throw std::runtime_error("ansatz: excitation source modes must be occupied in the reference");
        if (occ.count(a) || occ.count(b))
            throw std::runtime_error("ansatz: excitation target modes must be unoccupied in the reference");
        if (!seen.insert(ex).second) throw std::runtime_error("ansatz: duplicate excitation");
    }
}

std::string AnsatzSpec::serialize() const {
    std::ostringstream os;
    os.precision(17);
    os << "occupied =";
    for (int m : occupied) os << " " << m;
    os << "\n";
    for (size_t t = 0; t < excitations.size(); ++t) {
        const auto& ex = excitations[t];
        os << "excitation = " << ex[0] << " " << ex[1] << " " << ex[2] << " " << ex[3]
           << " theta " << thetas[t] << "\n";
    }
    return os.str();
}

AnsatzSpec AnsatzSpec::deserialize(const std::string& text) {
    AnsatzSpec spec;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        size_t eq = t.find('=');
        if (eq == std::string::npos) throw ParseError("expected key = value", lineno);
        std::string key = trim(t.substr(0, eq));
        std::istringstream vs(t.substr(eq + 1));
        if (key == "occupied") {
            int m;
            while (vs >> m) spec.occupied.push_back(m);
        } else if (key == "excitation") {
            std::array<int, 4> ex;
            std::string kw;
            double th;
            if (!(vs >> ex[0] >> ex[1] >> ex[2] >> ex[3] >> kw >> th) || kw != "theta")
                throw ParseError("malformed excitation line", lineno);
            spec.excitations.push_back(ex);
            spec.thetas.push_back(th);
        } else {
            throw ParseError("unknown ansatz key '" + key + "'", lineno);
        }
    }
    return spec;
}

namespace {

struct ExcMasks {
    uint64_t ij, ab, all;
    int i, j, a, b;
};

ExcMasks masks_of(const std::array<int, 4>& ex) {
    ExcMasks m;
    m.i = ex[0], m.j = ex[1], m.a = ex[2], m.b = ex[3];
    m.ij = (uint64_t(1) << m.i) | (uint64_t(1) << m.j);
    m.ab = (uint64_t(1) << m.a) | (uint64_t(1) << m.b);
    m.all = m.ij | m.ab;
    return m;
}

// sign of a+_a a+_b a_j a_i acting on |idx> (idx has i,j occupied, a,b empty)
int excitation_sign(size_t idx, const ExcMasks& m) {
    int sign = 1;
    uint64_t bits = idx;
    auto ann = [&](int mode) {
        sign *= parity_sign(bits & bits_below(mode));
        bits &= ~(uint64_t(1) << mode);
    };
    auto cre = [&](int mode) {
        sign *= parity_sign(bits & bits_below(mode));
        bits |= uint64_t(1) << mode;
    };
    ann(m.i);
    ann(m.j);
    cre(m.b);
    cre(m.a);
    return sign;
}

// in place: v <- exp(theta (T - T+)) v for T = a+_a a+_b a_j a_i
void apply_excitation_rotation(StateVector& v, const ExcMasks& m, double theta) {
    const double c = std::cos(theta), s = std::sin(theta);
    const size_t dim = v.dim();
    for (size_t idx = 0; idx < dim; ++idx) {
        if ((idx & m.all) != m.ij) continue;  // need i,j occupied and a,b empty
        const size_t partner = idx ^ m.all;
        const int sg = excitation_sign(idx, m);
        const cplx vi = v.amps[idx], vp = v.amps[partner];
        v.amps[idx] = c * vi - sg * s * vp;
        v.amps[partner] = sg * s * vi + c * vp;
    }
}

// in place: v <- (T - T+) v (the anti-Hermitian generator). States outside
// the coupled pairs are annihilated by both T and T+.
void apply_excitation_generator(StateVector& v, const ExcMasks& m) {
    const size_t dim = v.dim();
    for (size_t idx = 0; idx < dim; ++idx) {
        const uint64_t pattern = idx & m.all;
        if (pattern == m.ij) {
            const size_t partner = idx ^ m.all;
            const double sg = excitation_sign(idx, m);
            const cplx vi = v.amps[idx], vp = v.amps[partner];
            v.amps[idx] = -sg * vp;
            v.amps[partner] = sg * vi;
        } else if (pattern != m.ab) {
            v.amps[idx] = 0.0;
        }
    }
}

}  // namespace

StateVector uccd_state(const AnsatzSpec& spec, int n_qubits) {
    spec.validate(n_qubits);
    StateVector v = hf_state(n_qubits, spec.occupied);
    for (size_t t = 0; t < spec.excitations.size(); ++t)
        apply_excitation_rotation(v, masks_of(spec.excitations[t]), spec.thetas[t]);
    return v;
}

namespace {

double energy_of(const AnsatzSpec& spec, const PauliSum& h, const std::vector<double>& th) {
    AnsatzSpec s = spec;
    s.thetas = th;
    StateVector v = uccd_state(s, h.n_qubits());
    return expectation(h, v).real();
}

// adjoint-mode exact gradient of <psi(theta)|H|psi(theta)>
std::vector<double> gradient_of(const AnsatzSpec& spec, const PauliSum& h,
                                const std::vector<double>& th) {
    AnsatzSpec s = spec;
    s.thetas = th;
    const int n = h.n_qubits();
    StateVector psi = uccd_state(s, n);
    StateVector chi = apply(h, psi);
    const size_t T = s.excitations.size();
    std::vector<double> grad(T, 0.0);
    for (size_t t = T; t-- > 0;) {
        ExcMasks m = masks_of(s.excitations[t]);
        StateVector gpsi = psi;
        apply_excitation_generator(gpsi, m);
        grad[t] = 2.0 * inner(chi, gpsi).real();
        apply_excitation_rotation(psi, m, -s.thetas[t]);
        apply_excitation_rotation(chi, m, -s.thetas[t]);
    }
    return grad;
}

double norm2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

struct BfgsOutcome {
    std::vector<double> theta;
    double energy;
    double gnorm;
    int iters;
    bool converged;
};

BfgsOutcome bfgs_minimize(const AnsatzSpec& spec, const PauliSum& h, std::vector<double> th,
                          const VqeOptions& opt) {
    const size_t n = th.size();
    std::vector<std::vector<double>> Hinv(n, std::vector<double>(n, 0.0));
    for (size_t i = 0; i < n; ++i) Hinv[i][i] = 1.0;
    double e = energy_of(spec, h, th);
    std::vector<double> g = gradient_of(spec, h, th);
    int it = 0;
    for (; it < opt.max_iterations; ++it) {
        double gn = norm2(g);
        if (gn < opt.gradient_tol) return {th, e, gn, it, true};
        // direction = -Hinv g
        std::vector<double> d(n, 0.0);
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j) d[i] -= Hinv[i][j] * g[j];
        double slope = 0.0;
        for (size_t i = 0; i < n; ++i) slope += d[i] * g[i];
        if (slope > 0) {  // reset curvature if direction is not a descent
            for (size_t i = 0; i < n; ++i)
                for (size_t j = 0; j < n; ++j) Hinv[i][j] = (i == j) ? 1.0 : 0.0;
            for (size_t i = 0; i < n; ++i) d[i] = -g[i];
            slope = -norm2(g) * norm2(g);
        }
        // backtracking Armijo line search
        double step = 1.0, e_new = 0.0;
        std::vector<double> th_new;
        bool ok = false;
        for (int ls = 0; ls < 40; ++ls) {
            th_new = th;
            for (size_t i = 0; i < n; ++i) th_new[i] += step * d[i];
            e_new = energy_of(spec, h, th_new);
            if (e_new <= e + 1e-4 * step * slope) {
                ok = true;
                break;
            }
            step *= 0.5;
        }
        if (!ok) return {th, e, gn, it, gn < opt.gradient_tol};
        std::vector<double> g_new = gradient_of(spec, h, th_new);
        // BFGS update of the inverse Hessian
        std::vector<double> sv(n), yv(n);
        for (size_t i = 0; i < n; ++i) {
            sv[i] = th_new[i] - th[i];
            yv[i] = g_new[i] - g[i];
        }
        double sy = 0.0;
        for (size_t i = 0; i < n; ++i) sy += sv[i] * yv[i];
        if (sy > 1e-12) {
            std::vector<double> Hy(n, 0.0);
            for (size_t i = 0; i < n; ++i)
                for (size_t j = 0; j < n; ++j) Hy[i] += Hinv[i][j] * yv[j];
            double yHy = 0.0;
            for (size_t i = 0; i < n; ++i) yHy += yv[i] * Hy[i];
            for (size_t i = 0; i < n; ++i)
                for (size_t j = 0; j < n; ++j)
                    Hinv[i][j] += ((sy + yHy) * sv[i] * sv[j]) / (sy * sy) -
                                  (Hy[i] * sv[j] + sv[i] * Hy[j]) / sy;
        }
        th = std::move(th_new);
        e = e_new;
        g = std::move(g_new);
    }
    return {th, e, norm2(g), it, norm2(g) < opt.gradient_tol};
}

}  // namespace

VqeResult vqe_optimize(const AnsatzSpec& spec, const PauliSum& h, const VqeOptions& opt) {
    spec.validate(h.n_qubits());
    const size_t n = spec.thetas.size();
    BfgsOutcome best{{}, 0.0, 0.0, 0, false};
    bool have_best = false;
    for (int start = 0; start < std::max(1, opt.n_starts); ++start) {
        std::vector<double> th0 = spec.thetas;
        if (start > 0) {
            std::mt19937_64 rng(stream_seed(opt.seed, static_cast<uint64_t>(start)));
            std::uniform_real_distribution<double> u(-0.1, 0.1);
            for (size_t i = 0; i < n; ++i) th0[i] = u(rng);
        }
        BfgsOutcome o = bfgs_minimize(spec, h, th0, opt);
        if (!have_best || o.energy < best.energy ||
            (o.converged && !best.converged && o.energy < best.energy + 1e-12)) {
            best = o;
            have_best = true;
        }
    }
    VqeResult res;
    res.spec = spec;
    res.spec.thetas = best.theta;
    res.energy = best.energy;
    res.gradient_norm = best.gnorm;
    res.iterations = best.iters;
    if (!best.converged)
        throw VqeError("vqe_optimize: gradient norm " + std::to_string(best.gnorm) +
                           " above tolerance after iteration budget",
                       res);
    return res;
}

}  // namespace qcm

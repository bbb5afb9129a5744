#include "qcm/fci.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace qcm {

std::vector<size_t> sector_basis(int n_qubits, int n_elec, int ms2) {
    uint64_t alpha_mask = 0;
    for (int q = 0; q < n_qubits; q += 2) alpha_mask |= uint64_t(1) << q;
    std::vector<size_t> basis;
    const size_t dim = size_t(1) << n_qubits;
    for (size_t b = 0; b < dim; ++b) {
        if (popcount64(b) != n_elec) continue;
        int na = popcount64(b & alpha_mask);
        int nb = n_elec - na;
        if (na - nb != ms2) continue;
        basis.push_back(b);
    }
    return basis;
}

namespace {

using SectorVec = Eigen::VectorXcd;

// op restricted to the sector, applied to a sector-packed vector
struct SectorOp {
    std::vector<std::pair<PauliWord, cplx>> terms;
    const std::vector<size_t>* basis;
    std::unordered_map<size_t, size_t> index_of;

    SectorVec apply(const SectorVec& v) const {
        SectorVec out = SectorVec::Zero(v.size());
        for (const auto& [w, c] : terms) {
            const cplx base = c * phase_factor(popcount64(w.x & w.z));
            for (Eigen::Index j = 0; j < v.size(); ++j) {
                const size_t b = (*basis)[j];
                auto it = index_of.find(b ^ w.x);
                if (it == index_of.end()) continue;
                const double sgn = (popcount64(w.z & b) & 1) ? -1.0 : 1.0;
                out[static_cast<Eigen::Index>(it->second)] += base * sgn * v[j];
            }
        }
        return out;
    }
};

std::pair<double, SectorVec> lanczos_lowest(const SectorOp& op, size_t dim, double tol,
                                            int max_iter = 400) {
    SectorVec v = SectorVec::Zero(static_cast<Eigen::Index>(dim));
    // deterministic start vector
    for (Eigen::Index i = 0; i < v.size(); ++i)
        v[i] = cplx(1.0 + 0.37 * std::cos(0.91 * static_cast<double>(i)), 0.0);
    v.normalize();
    std::vector<SectorVec> vs{v};
    std::vector<double> alpha, beta;
    for (int it = 0; it < max_iter; ++it) {
        SectorVec w = op.apply(vs.back());
        double a = std::real(vs.back().dot(w));
        alpha.push_back(a);
        w -= a * vs.back();
        if (vs.size() > 1) w -= beta.back() * vs[vs.size() - 2];
        // full reorthogonalization keeps the small problem numerically clean
        for (const SectorVec& u : vs) w -= u.dot(w) * u;
        double b = w.norm();
        const size_t k = alpha.size();
        Eigen::MatrixXd T = Eigen::MatrixXd::Zero(k, k);
        for (size_t i = 0; i < k; ++i) {
            T(i, i) = alpha[i];
            if (i + 1 < k) T(i, i + 1) = T(i + 1, i) = beta[i];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
        double e = es.eigenvalues()(0);
        // Ritz residual ||(H - e) y|| = beta_k |last component|
        double resid = b * std::abs(es.eigenvectors()(static_cast<Eigen::Index>(k - 1), 0));
        if (resid < tol * std::max(1.0, std::abs(e)) || b < 1e-14 || k == dim) {
            SectorVec ground = SectorVec::Zero(static_cast<Eigen::Index>(dim));
            for (size_t i = 0; i < k; ++i) ground += es.eigenvectors()(i, 0) * vs[i];
            ground.normalize();
            return {e, ground};
        }
        beta.push_back(b);
        vs.push_back(w / b);
    }
    throw std::runtime_error("fci_solve: Lanczos did not converge");
}

}  // namespace

FciResult fci_solve(const PauliSum& op, int n_elec, int ms2, const FciOptions& opt) {
    if (op.max_imag() > 1e-10)
        throw std::runtime_error("fci_solve: operator is not Hermitian (complex coefficients)");
    std::vector<size_t> basis = sector_basis(op.n_qubits(), n_elec, ms2);
    if (basis.empty()) throw std::runtime_error("fci_solve: empty particle-number sector");
    const size_t dim = basis.size();

    SectorOp sop;
    sop.terms = op.sorted_terms();
    sop.basis = &basis;
    sop.index_of.reserve(dim * 2);
    for (size_t j = 0; j < dim; ++j) sop.index_of.emplace(basis[j], j);

    double energy;
    SectorVec ground;
    if (dim <= opt.dense_max_dim && !opt.force_iterative) {
        Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(dim, dim);
        for (size_t j = 0; j < dim; ++j) {
            SectorVec e = SectorVec::Zero(static_cast<Eigen::Index>(dim));
            e[static_cast<Eigen::Index>(j)] = 1.0;
            M.col(static_cast<Eigen::Index>(j)) = sop.apply(e);
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(M);
        energy = es.eigenvalues()(0);
        ground = es.eigenvectors().col(0);
    } else {
        std::tie(energy, ground) = lanczos_lowest(sop, dim, opt.tol);
    }

    // deterministic phase: largest-magnitude amplitude real positive
    Eigen::Index imax = 0;
    double amax = 0.0;
    for (Eigen::Index i = 0; i < ground.size(); ++i)
        if (std::abs(ground[i]) > amax + 1e-15) {
            amax = std::abs(ground[i]);
            imax = i;
        }
    cplx ph = ground[imax] / amax;
    ground /= ph;

    FciResult res;
    res.energy = energy;
    res.state = StateVector(op.n_qubits());
    for (size_t j = 0; j < dim; ++j) res.state.amps[basis[j]] = ground[static_cast<Eigen::Index>(j)];
    return res;
}

double eigen_residual(const PauliSum& op, double energy, const StateVector& state) {
    StateVector hv = apply(op, state);
    double s = 0.0;
    for (size_t i = 0; i < hv.dim(); ++i) s += std::norm(hv.amps[i] - energy * state.amps[i]);
    return std::sqrt(s);
}

}  // namespace qcm

#include "qcm/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qcm {

namespace {

MomentSet moments_at(const EstimationContext& ctx, Method method, double lambda) {
    if (!ctx.noisy)
        return assemble_moments(ctx.trial.table, lambda, method_truncates(method));
    return method_tables(method, ctx.trial, ctx.ref_noisy, ctx.ref_exact, *ctx.ops, lambda)
        .moments;
}

}  // namespace

EnergyPoint energy_at(const EstimationContext& ctx, Method method, double lambda) {
    EnergyPoint pt;
    pt.lambda = lambda;
    pt.moments = moments_at(ctx, method, lambda);
    LanczosEstimate est = lanczos_energy(cumulants(pt.moments));
    pt.e_l = est.value;
    pt.branch = est.branch;
    return pt;
}

std::vector<EnergyPoint> energy_curve(const EstimationContext& ctx, Method method,
                                      const std::vector<double>& lambdas) {
    std::vector<EnergyPoint> curve;
    curve.reserve(lambdas.size());
    for (double lam : lambdas) {
        if (!std::isfinite(lam)) throw std::runtime_error("energy_curve: non-finite lambda");
        curve.push_back(energy_at(ctx, method, lam));
    }
    return curve;
}

ScanRow mu_L(const EstimationContext& ctx, Method method, double delta) {
    if (!(delta > 0.0)) throw std::runtime_error("mu_L: delta must be positive");
    ScanRow row;
    row.method = method;
    row.delta = delta;
    EnergyPoint plus = energy_at(ctx, method, delta);
    EnergyPoint minus = energy_at(ctx, method, -delta);
    row.el_plus = plus.e_l;
    row.el_minus = minus.e_l;
    row.branch_plus = plus.branch;
    row.branch_minus = minus.branch;
    row.mu_L_au = (plus.e_l - minus.e_l) / (2.0 * delta);
    row.mu_L_debye = row.mu_L_au * kDebyePerAu;
    row.mu_expect_au = mu_expect(ctx, method, delta);
    return row;
}

double mu_expect(const EstimationContext& ctx, Method method, double delta) {
    if (!(delta > 0.0)) throw std::runtime_error("mu_expect: delta must be positive");
    if (!ctx.noisy) {
        // exactly T[1][1]: evaluate the finite difference in extended precision
        return static_cast<double>(moment1_difference(ctx.trial.table, delta) /
                                   (2.0L * static_cast<long double>(delta)));
    }
    MomentSet plus = moments_at(ctx, method, delta);
    MomentSet minus = moments_at(ctx, method, -delta);
    return (plus.m[1] - minus.m[1]) / (2.0 * delta);
}

double eq10_residual(const EstimationContext& ctx, double delta) {
    const CoefficientTable& t = ctx.trial.table;
    long double fd = moment1_difference(t, delta) / (2.0L * static_cast<long double>(delta));
    return static_cast<double>(fd - static_cast<long double>(t.at(1, 1)));
}

std::vector<ScanRow> scan(const EstimationContext& ctx, const std::vector<Method>& methods,
                          const std::vector<double>& deltas, bool with_bootstrap,
                          int n_resamples, uint64_t seed) {
    for (size_t i = 0; i + 1 < deltas.size(); ++i)
        if (!(deltas[i] < deltas[i + 1]))
            throw std::runtime_error("scan: delta grid must be strictly increasing");
    for (double d : deltas)
        if (!(d > 0.0)) throw std::runtime_error("scan: delta grid must be positive");

    std::vector<ScanRow> rows;
    for (Method m : methods)
        for (double d : deltas) rows.push_back(mu_L(ctx, m, d));

    if (with_bootstrap && ctx.noisy && ctx.trial.has_counts()) {
        auto closure = [&](const std::vector<SampledTable>& ts) {
            EstimationContext rctx = ctx;
            rctx.trial = ts[0];
            rctx.ref_noisy = ts[1];
            std::vector<double> out;
            out.reserve(rows.size() * 2);
            for (Method m : methods)
                for (double d : deltas) {
                    ScanRow r = mu_L(rctx, m, d);
                    out.push_back(r.mu_L_au);
                    out.push_back(r.mu_expect_au);
                }
            return out;
        };
        BootstrapStats stats =
            bootstrap(closure, {ctx.trial, ctx.ref_noisy}, *ctx.ops, n_resamples, seed);
        for (size_t i = 0; i < rows.size(); ++i) {
            rows[i].mu_L_std = stats.stddev[2 * i];
            rows[i].mu_expect_std = stats.stddev[2 * i + 1];
            rows[i].has_std = true;
        }
    }
    return rows;
}

ReferenceValues references(const PauliSum& h, const PauliSum& mu, int n_elec, int ms2,
                           const std::vector<int>& occupied) {
    ReferenceValues rv;
    FciResult ground = fci_solve(h, n_elec, ms2);
    rv.e_fci = ground.energy;
    rv.mu_fci = expectation(mu, ground.state).real();
    StateVector hf = hf_state(h.n_qubits(), occupied);
    rv.e_hf = expectation(h, hf).real();
    rv.mu_hf = expectation(mu, hf).real();
    if (rv.e_fci > rv.e_hf + 1e-12)
        throw std::runtime_error("references: FCI energy above the HF energy");
    rv.fd_delta = {0.04, 0.02, 0.01};
    for (size_t i = 0; i < rv.fd_delta.size(); ++i) {
        const double d = rv.fd_delta[i];
        double ep = fci_solve(h.plus(mu.scaled(d)), n_elec, ms2).energy;
        double em = fci_solve(h.plus(mu.scaled(-d)), n_elec, ms2).energy;
        rv.fd_mu[i] = (ep - em) / (2.0 * d);
    }
    return rv;
}

std::string scan_csv(const std::vector<ScanRow>& rows, const std::string& header_comment) {
    std::ostringstream os;
    os.precision(12);
    if (!header_comment.empty()) os << "# " << header_comment << "\n";
    os << "method,delta,mu_L_au,mu_L_debye,mu_L_std,mu_expect_au,mu_expect_std,EL_plus,"
          "EL_minus,branch_plus,branch_minus\n";
    for (const ScanRow& r : rows) {
        os << method_name(r.method) << "," << r.delta << "," << r.mu_L_au << "," << r.mu_L_debye
           << "," << (r.has_std ? r.mu_L_std : 0.0) << "," << r.mu_expect_au << ","
           << (r.has_std ? r.mu_expect_std : 0.0) << "," << r.el_plus << "," << r.el_minus << ","
           << branch_name(r.branch_plus) << "," << branch_name(r.branch_minus) << "\n";
    }
    return os.str();
}

std::string energy_curve_csv(
    const std::vector<std::pair<Method, std::vector<EnergyPoint>>>& curves,
    const std::string& header_comment) {
    std::ostringstream os;
    os.precision(12);
    if (!header_comment.empty()) os << "# " << header_comment << "\n";
    os << "method,lambda,E_L,branch,m1,m2,m3,m4\n";
    for (const auto& [method, curve] : curves)
        for (const EnergyPoint& pt : curve)
            os << method_name(method) << "," << pt.lambda << "," << pt.e_l << ","
               << branch_name(pt.branch) << "," << pt.moments.m[1] << "," << pt.moments.m[2]
               << "," << pt.moments.m[3] << "," << pt.moments.m[4] << "\n";
    return os.str();
}

}  // namespace qcm

#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qcm/ansatz.hpp"
#include "qcm/fci.hpp"
#include "qcm/lanczos.hpp"
#include "qcm/noise.hpp"

namespace qcm {

/// Everything needed to evaluate mitigated moments and E_L at any lambda from
/// one set of measurements. In exact mode only `trial` is meaningful (its
/// table holds analytic expectations and no mitigation is applied).
struct EstimationContext {
    bool noisy = false;
    std::shared_ptr<const MeasuredOperators> ops;
    SampledTable trial;
    SampledTable ref_noisy;
    CoefficientTable ref_exact;
};

struct EnergyPoint {
    double lambda = 0.0;
    double e_l = 0.0;
    Branch branch = Branch::regular;
    MomentSet moments;
};

EnergyPoint energy_at(const EstimationContext& ctx, Method method, double lambda);

/// E_L over a lambda grid; one measurement set serves every point.
std::vector<EnergyPoint> energy_curve(const EstimationContext& ctx, Method method,
                                      const std::vector<double>& lambdas);

/// One scan row: central-difference moments-corrected dipole at step delta.
struct ScanRow {
    Method method = Method::B;
    double delta = 0.0;
    double mu_L_au = 0.0;
    double mu_L_debye = 0.0;
    double mu_L_std = 0.0;
    double mu_expect_au = 0.0;
    double mu_expect_std = 0.0;
    double el_plus = 0.0;
    double el_minus = 0.0;
    Branch branch_plus = Branch::regular;
    Branch branch_minus = Branch::regular;
    bool has_std = false;
};

ScanRow mu_L(const EstimationContext& ctx, Method method, double delta);

/// Finite-difference estimate of <mu> from the first moment at +-delta
/// (exactly T[1][1] in analytic mode for any delta).
double mu_expect(const EstimationContext& ctx, Method method, double delta);

/// Residual of the exact linearity identity (m1(d) - m1(-d))/(2d) - T[1][1],
/// evaluated in extended precision on the context's trial table.
double eq10_residual(const EstimationContext& ctx, double delta);

/// Full row set per method per delta; when bootstrap is on and the tables
/// carry counts, the std columns are filled from n_resamples redraws of the
/// same measurements.
std::vector<ScanRow> scan(const EstimationContext& ctx, const std::vector<Method>& methods,
                          const std::vector<double>& deltas, bool with_bootstrap,
                          int n_resamples, uint64_t seed);

struct ReferenceValues {
    double e_fci = 0.0;
    double mu_fci = 0.0;  // <Phi_0|mu|Phi_0>, operator constant included
    double e_hf = 0.0;
    double mu_hf = 0.0;
    // exact-eigenstate finite-difference checks (E(+d)-E(-d))/2d at three steps
    std::array<double, 3> fd_delta{};
    std::array<double, 3> fd_mu{};
};

ReferenceValues references(const PauliSum& h, const PauliSum& mu, int n_elec, int ms2,
                           const std::vector<int>& occupied);

std::string scan_csv(const std::vector<ScanRow>& rows, const std::string& header_comment);
std::string energy_curve_csv(const std::vector<std::pair<Method, std::vector<EnergyPoint>>>& curves,
                             const std::string& header_comment);

}  // namespace qcm

// qcm: moments-corrected ground-state energy and dipole estimation with a
// simulated noisy backend.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>

#include "qcm/config.hpp"
#include "qcm/selfcheck.hpp"

namespace fs = std::filesystem;
using namespace qcm;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

struct GlobalArgs {
    std::string config_path;
    std::optional<uint64_t> seed;
    int threads = 1;
    std::string out_override;
};

RunConfig load_config(const GlobalArgs& ga) {
    RunConfig cfg = parse_config_file(ga.config_path);
    if (ga.seed) cfg.noise.seed = *ga.seed;
    if (!ga.out_override.empty()) cfg.out_dir = ga.out_override;
    validate_config(cfg);
    return cfg;
}

std::string stamp(const RunConfig& cfg) {
    std::ostringstream os;
    os << "qcm " << kToolVersion << "; config fnv1a=" << std::hex << fnv1a(cfg.raw_text)
       << std::dec << "; seed=" << cfg.noise.seed;
    return os.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

std::string mode_tag(const RunConfig& cfg) {
    return cfg.noise.enabled && cfg.noise.shots_per_group > 0 ? "sampled" : "analytic";
}

int cmd_validate(const GlobalArgs& ga) {
    RunConfig cfg = load_config(ga);  // throws on structural problems
    std::cout << "config ok: " << ga.config_path << "\n";
    auto results = check::run_validation_suite(cfg.noise.seed);
    bool all = true;
    for (const auto& r : results) {
        std::cout << (r.pass ? "PASS" : "FAIL") << "  " << r.name << "  (" << r.detail << ")\n";
        all = all && r.pass;
    }
    return all ? kExitOk : kExitValidation;
}

int cmd_fci(const GlobalArgs& ga) {
    RunConfig cfg = load_config(ga);
    PreparedRun run = prepare_run(cfg);
    const ReferenceValues& rv = run.refs;
    std::ostringstream os;
    os.precision(12);
    os << "E_FCI  " << rv.e_fci << "\n"
       << "E_HF   " << rv.e_hf << "\n"
       << "mu_FCI " << rv.mu_fci << "  (" << rv.mu_fci * kDebyePerAu << " debye)\n"
       << "mu_HF  " << rv.mu_hf << "  (" << rv.mu_hf * kDebyePerAu << " debye)\n";
    for (size_t i = 0; i < rv.fd_delta.size(); ++i)
        os << "finite_difference delta=" << rv.fd_delta[i] << "  mu=" << rv.fd_mu[i]
           << "  |err|=" << std::abs(rv.fd_mu[i] - rv.mu_fci) << "\n";
    std::cout << os.str();
    fs::create_directories(cfg.out_dir);
    write_file(cfg.out_dir + "/references.txt", "# " + stamp(cfg) + "\n" + os.str());
    return kExitOk;
}

int cmd_moments(const GlobalArgs& ga) {
    RunConfig cfg = load_config(ga);
    PreparedRun run = prepare_run(cfg, cfg.out_dir + "/samples");
    fs::create_directories(cfg.out_dir);
    const std::string hdr = "# " + stamp(cfg) + "\n";
    write_file(cfg.out_dir + "/table_trial.txt", hdr + write_table(run.ctx.trial.table));
    write_file(cfg.out_dir + "/table_reference_exact.txt", hdr + write_table(run.ctx.ref_exact));
    if (run.ctx.noisy)
        write_file(cfg.out_dir + "/table_reference_noisy.txt",
                   hdr + write_table(run.ctx.ref_noisy.table));
    if (run.ctx.trial.has_counts()) {
        save_sampled(cfg.out_dir + "/samples", *run.ops, run.ctx.trial, StateLabel::trial);
        save_sampled(cfg.out_dir + "/samples", *run.ops, run.ctx.ref_noisy,
                     StateLabel::reference);
    }
    std::cout << "wrote coefficient tables to " << cfg.out_dir << "\n";
    return kExitOk;
}

int cmd_scan(const GlobalArgs& ga) {
    RunConfig cfg = load_config(ga);
    const std::string sample_dir = cfg.out_dir + "/samples";
    PreparedRun run;
    try {
        run = prepare_run(cfg, sample_dir);
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("stage prepare: ") + e.what());
    }
    fs::create_directories(cfg.out_dir);
    if (run.ctx.trial.has_counts()) {
        save_sampled(sample_dir, *run.ops, run.ctx.trial, StateLabel::trial);
        save_sampled(sample_dir, *run.ops, run.ctx.ref_noisy, StateLabel::reference);
    }

    const bool sampled = run.ctx.noisy && run.ctx.trial.has_counts();
    std::vector<ScanRow> rows;
    try {
        rows = scan(run.ctx, cfg.methods, cfg.grid, sampled, cfg.n_resamples, cfg.noise.seed);
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("stage scan: ") + e.what());
    }

    // per-method scan CSVs
    for (Method m : cfg.methods) {
        std::vector<ScanRow> mine;
        for (const ScanRow& r : rows)
            if (r.method == m) mine.push_back(r);
        write_file(cfg.out_dir + "/scan_" + method_name(m) + "_" + mode_tag(cfg) + ".csv",
                   scan_csv(mine, stamp(cfg)));
    }

    // energy curve over a symmetric lambda grid (one measurement set)
    std::vector<double> lambdas;
    for (auto it = cfg.grid.rbegin(); it != cfg.grid.rend(); ++it) lambdas.push_back(-*it);
    lambdas.push_back(0.0);
    for (double d : cfg.grid) lambdas.push_back(d);
    std::vector<std::pair<Method, std::vector<EnergyPoint>>> curves;
    try {
        for (Method m : cfg.methods) curves.emplace_back(m, energy_curve(run.ctx, m, lambdas));
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("stage energy_curve: ") + e.what());
    }
    write_file(cfg.out_dir + "/energy_curve_" + mode_tag(cfg) + ".csv",
               energy_curve_csv(curves, stamp(cfg)));

    // references
    {
        const ReferenceValues& rv = run.refs;
        std::ostringstream os;
        os.precision(12);
        os << "# " << stamp(cfg) << "\n";
        os << "E_FCI " << rv.e_fci << "\nE_HF " << rv.e_hf << "\nmu_FCI " << rv.mu_fci
           << "\nmu_HF " << rv.mu_hf << "\n";
        write_file(cfg.out_dir + "/references.txt", os.str());
    }

    // summary: smallest-delta row per method plus branch-flag counts
    std::ostringstream sum;
    sum.precision(10);
    sum << "# " << stamp(cfg) << "\n";
    for (Method m : cfg.methods) {
        const ScanRow* first = nullptr;
        int flagged = 0;
        for (const ScanRow& r : rows) {
            if (r.method != m) continue;
            if (!first || r.delta < first->delta) first = &r;
            if (r.branch_plus != Branch::regular || r.branch_minus != Branch::regular) ++flagged;
        }
        sum << "method " << method_name(m) << ": mu_L(" << first->delta << ") = " << first->mu_L_au
            << " au (" << first->mu_L_debye << " debye)";
        if (first->has_std) sum << " +- " << first->mu_L_std;
        sum << "; mu_expect = " << first->mu_expect_au << "; flagged_rows = " << flagged << "/"
            << std::count_if(rows.begin(), rows.end(),
                             [m](const ScanRow& r) { return r.method == m; })
            << "\n";
    }
    sum << "mu_FCI = " << run.refs.mu_fci << " au; mu_HF = " << run.refs.mu_hf << " au\n";
    write_file(cfg.out_dir + "/summary.txt", sum.str());
    std::cout << sum.str();
    return kExitOk;
}

int cmd_calibrate(const GlobalArgs& ga) {
    RunConfig cfg = load_config(ga);
    if (!cfg.noise.enabled)
        throw std::runtime_error("calibrate requires [noise] enabled (shots = 0 gives the analytic channel)");
    PreparedRun run = prepare_run(cfg, cfg.out_dir + "/samples");
    NoiseSpec clean;
    clean.shots_per_group = 0;
    CoefficientTable trial_exact =
        sample_table(*run.ops, run.trial_state, clean, StateLabel::trial).table;
    const CoefficientTable& ref_exact = run.ctx.ref_exact;

    std::ostringstream os;
    os.precision(6);
    os << "# " << stamp(cfg) << "\n";
    os << "# normalized error: (value - exact)/(mixed - exact); mixed state = 1\n";
    os << "state,p,k,err_unmitigated,err_mitigated,q_hat,flags\n";
    std::map<int, std::pair<double, int>> by_order;  // k -> (sum |err_mit| of trial, count)
    for (int which = 0; which < 2; ++which) {
        const bool is_trial = which == 0;
        const CoefficientTable& noisy =
            is_trial ? run.ctx.trial.table : run.ctx.ref_noisy.table;
        const CoefficientTable& exact = is_trial ? trial_exact : ref_exact;
        for (int p = 1; p <= kMaxMomentOrder; ++p)
            for (int k = 0; k <= p; ++k) {
                const int pk = pk_index(p, k);
                const double mixed = run.ops->id_coeff[pk];
                Calibration cal =
                    calibrate(run.ctx.ref_noisy.table.at(p, k), ref_exact.at(p, k), mixed);
                double mit = mitigate(noisy.at(p, k), mixed, cal.q);
                double den = mixed - exact.at(p, k);
                double err_un = 0.0, err_mit = 0.0;
                if (std::abs(den) > 1e-14) {
                    err_un = (noisy.at(p, k) - exact.at(p, k)) / den;
                    err_mit = (mit - exact.at(p, k)) / den;
                }
                os << (is_trial ? "trial" : "reference") << "," << p << "," << k << "," << err_un
                   << "," << err_mit << "," << cal.q << ","
                   << (cal.degenerate ? "degenerate" : (cal.clamped ? "clamped" : "-")) << "\n";
                if (is_trial) {
                    by_order[k].first += std::abs(err_mit);
                    by_order[k].second += 1;
                }
            }
    }
    os << "# mean |normalized error| of mitigated trial coefficients by order in mu\n";
    for (const auto& [k, acc] : by_order)
        os << "# order " << k << ": " << acc.first / acc.second << "\n";
    fs::create_directories(cfg.out_dir);
    write_file(cfg.out_dir + "/calibration.csv", os.str());
    std::cout << os.str();
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"moments-corrected energy and dipole estimation"};
    app.require_subcommand(1);
    GlobalArgs ga;
    app.add_option("--config", ga.config_path, "run configuration file");
    app.add_option("--seed", ga.seed, "override the noise seed");
    app.add_option("--threads", ga.threads, "worker thread budget")->check(CLI::PositiveNumber);
    app.add_option("--out", ga.out_override, "override the output directory");

    bool print_defaults = false;
    CLI::App* validate = app.add_subcommand("validate", "check a config and run self-tests");
    validate->add_flag("--print-defaults", print_defaults, "print the default config and exit");
    CLI::App* scan = app.add_subcommand("scan", "delta-scan of the dipole estimators");
    CLI::App* calib = app.add_subcommand("calibrate", "per-coefficient mitigation report");
    CLI::App* fci = app.add_subcommand("fci", "exact references (FCI, HF, finite differences)");
    CLI::App* moments = app.add_subcommand("moments", "export coefficient tables");

    CLI11_PARSE(app, argc, argv);
    set_max_threads(ga.threads);

    try {
        if (validate->parsed() && print_defaults) {
            std::cout << default_config_text();
            return kExitOk;
        }
        if (ga.config_path.empty()) {
            std::cerr << "error: --config is required\n";
            return kExitValidation;
        }
        if (validate->parsed()) return cmd_validate(ga);
        try {
            if (scan->parsed()) return cmd_scan(ga);
            if (calib->parsed()) return cmd_calibrate(ga);
            if (fci->parsed()) return cmd_fci(ga);
            if (moments->parsed()) return cmd_moments(ga);
        } catch (const std::exception& e) {
            std::cerr << "runtime error: " << e.what() << "\n";
            return kExitRuntime;
        }
    } catch (const std::exception& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidation;
    }
    return kExitOk;
}

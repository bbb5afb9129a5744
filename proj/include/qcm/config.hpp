#pragma once

#include <array>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qcm/estimator.hpp"
#include "qcm/integrals.hpp"

namespace qcm {

/// 24 logarithmic points in [1e-4, 1e-1].
std::vector<double> default_delta_grid();

/// Run configuration, parsed from a sectioned key = value text file.
struct RunConfig {
    // [files]
    std::string fcidump_path;
    std::string dipole_path;
    // [space]
    std::vector<int> freeze_core;        // integral-level frozen spatial orbitals
    std::map<int, int> frozen_modes;     // moment-level mode -> occupation
    std::string max_annihilators = "auto";  // auto | off | integer
    // [ansatz]
    std::vector<int> occupied;                    // empty = lowest active modes
    std::vector<std::array<int, 4>> excitations;  // empty = all spin-allowed doubles
    bool hf_trial = false;                        // excitations = none: bare reference
    std::vector<double> thetas;                   // empty = optimize
    bool optimize_thetas = true;
    uint64_t vqe_seed = 1;
    // [noise]
    NoiseSpec noise;
    int n_resamples = 100;
    // [scan]
    std::vector<Method> methods{Method::B, Method::C, Method::D, Method::E};
    std::vector<double> grid = default_delta_grid();
    // [output]
    std::string out_dir = "out";

    std::string raw_text;  // original file contents, for fingerprinting
};

RunConfig parse_config(std::istream& in);
RunConfig parse_config_file(const std::string& path);

/// Structural checks that need no computation: file existence, method names,
/// grid monotonicity, q range, frozen-orbital overlap. Throws on failure.
void validate_config(const RunConfig& cfg);

/// The built-in defaults as a ready-to-edit config file.
std::string default_config_text();

/// Everything assembled from a config: operators, states, measurement data,
/// estimation context, and reference values.
struct PreparedRun {
    MolecularIntegrals mi;   // after integral-level freezing
    DipoleIntegrals di;
    FermionOperator h_ferm;  // operators over the post-freeze-core space
    FermionOperator mu_ferm;
    PauliSum h_qubit, mu_qubit;  // same space, for FCI references
    int n_active_modes = 0;
    int n_active_elec = 0;
    std::vector<int> active_occupied;
    StateVector trial_state;  // active-space states behind the tables
    StateVector ref_state;
    AnsatzSpec ansatz;
    std::shared_ptr<MeasuredOperators> ops;
    EstimationContext ctx;
    ReferenceValues refs;
};

/// Builds the full pipeline. When reuse_dir is nonempty and holds previously
/// sampled counts matching the noise spec, they are loaded instead of
/// resampling (measurement reuse across reruns).
PreparedRun prepare_run(const RunConfig& cfg, const std::string& reuse_dir = "");

}  // namespace qcm

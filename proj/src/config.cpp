#include "qcm/config.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace qcm {

namespace {

std::vector<int> parse_int_list(const std::string& v) {
    std::vector<int> out;
    for (const std::string& tok : split(v, ',')) {
        std::string t = trim(tok);
        if (!t.empty()) out.push_back(std::stoi(t));
    }
    return out;
}

std::vector<double> parse_double_list(const std::string& v) {
    std::vector<double> out;
    for (const std::string& tok : split(v, ',')) {
        std::string t = trim(tok);
        if (!t.empty()) out.push_back(std::stod(t));
    }
    return out;
}

// "m:occ, m:occ, ..."
std::map<int, int> parse_mode_occupations(const std::string& v, int lineno) {
    std::map<int, int> out;
    for (const std::string& tok : split(v, ',')) {
        std::string t = trim(tok);
        if (t.empty()) continue;
        std::vector<std::string> parts = split(t, ':');
        if (parts.size() != 2) throw ParseError("expected mode:occupation pairs", lineno);
        int mode = std::stoi(trim(parts[0]));
        int occ = std::stoi(trim(parts[1]));
        if (out.count(mode)) throw ParseError("duplicate frozen mode", lineno);
        out[mode] = occ;
    }
    return out;
}

// "i j -> a b ; i j -> a b"
std::vector<std::array<int, 4>> parse_excitations(const std::string& v, int lineno) {
    std::vector<std::array<int, 4>> out;
    for (const std::string& tok : split(v, ';')) {
        std::string t = trim(tok);
        if (t.empty()) continue;
        size_t arrow = t.find("->");
        if (arrow == std::string::npos) throw ParseError("excitation needs '->'", lineno);
        std::istringstream lhs(t.substr(0, arrow)), rhs(t.substr(arrow + 2));
        std::array<int, 4> ex;
        if (!(lhs >> ex[0] >> ex[1]) || !(rhs >> ex[2] >> ex[3]))
            throw ParseError("excitation needs two sources and two targets", lineno);
        out.push_back(ex);
    }
    return out;
}

std::vector<double> parse_grid(const std::string& v, int lineno) {
    std::string t = trim(v);
    if (t.rfind("log", 0) == 0) {
        std::istringstream ss(t.substr(3));
        double lo, hi;
        int n;
        if (!(ss >> lo >> hi >> n) || n < 2 || lo <= 0 || hi <= lo)
            throw ParseError("grid: expected 'log <lo> <hi> <n>'", lineno);
        std::vector<double> grid(n);
        for (int i = 0; i < n; ++i)
            grid[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
        return grid;
    }
    return parse_double_list(t);
}

}  // namespace

std::vector<double> default_delta_grid() {
    std::vector<double> grid(24);
    for (int i = 0; i < 24; ++i) grid[i] = 1e-4 * std::pow(1e3, i / 23.0);
    return grid;
}

RunConfig parse_config(std::istream& in) {
    RunConfig cfg;
    cfg.grid = default_delta_grid();
    std::ostringstream raw;
    std::string line, section;
    int lineno = 0;
    bool methods_set = false;
    while (std::getline(in, line)) {
        ++lineno;
        raw << line << "\n";
        std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']') throw ParseError("unterminated section header", lineno);
            section = lower(trim(t.substr(1, t.size() - 2)));
            continue;
        }
        size_t eq = t.find('=');
        if (eq == std::string::npos) throw ParseError("expected key = value", lineno);
        std::string key = lower(trim(t.substr(0, eq)));
        std::string val = trim(t.substr(eq + 1));
        std::string low = lower(val);

        if (section == "files") {
            if (key == "fcidump") cfg.fcidump_path = val;
            else if (key == "dipole") cfg.dipole_path = val;
            else throw ParseError("unknown key '" + key + "' in [files]", lineno);
        } else if (section == "space") {
            if (key == "freeze_core") cfg.freeze_core = parse_int_list(val);
            else if (key == "frozen_modes") cfg.frozen_modes = parse_mode_occupations(val, lineno);
            else if (key == "max_annihilators") cfg.max_annihilators = low;
            else throw ParseError("unknown key '" + key + "' in [space]", lineno);
        } else if (section == "ansatz") {
            if (key == "occupied") {
                if (low != "auto") cfg.occupied = parse_int_list(val);
            } else if (key == "excitations") {
                if (low == "none") cfg.hf_trial = true;
                else if (low != "auto") cfg.excitations = parse_excitations(val, lineno);
            } else if (key == "thetas") {
                if (low == "optimize") cfg.optimize_thetas = true;
                else {
                    cfg.optimize_thetas = false;
                    cfg.thetas = parse_double_list(val);
                }
            } else if (key == "vqe_seed") cfg.vqe_seed = std::stoull(val);
            else throw ParseError("unknown key '" + key + "' in [ansatz]", lineno);
        } else if (section == "noise") {
            if (key == "enabled") cfg.noise.enabled = (low == "true" || low == "1" || low == "yes");
            else if (key == "q") cfg.noise.q = std::stod(val);
            else if (key == "shots") cfg.noise.shots_per_group = std::stol(val);
            else if (key == "seed") cfg.noise.seed = std::stoull(val);
            else if (key == "resamples") cfg.n_resamples = std::stoi(val);
            else throw ParseError("unknown key '" + key + "' in [noise]", lineno);
        } else if (section == "scan") {
            if (key == "methods") {
                cfg.methods.clear();
                methods_set = true;
                for (const std::string& tok : split(val, ',')) {
                    std::string m = trim(tok);
                    if (!m.empty()) cfg.methods.push_back(method_from_name(m));
                }
            } else if (key == "grid") cfg.grid = parse_grid(val, lineno);
            else throw ParseError("unknown key '" + key + "' in [scan]", lineno);
        } else if (section == "output") {
            if (key == "dir") cfg.out_dir = val;
            else throw ParseError("unknown key '" + key + "' in [output]", lineno);
        } else {
            throw ParseError("key outside any known section", lineno);
        }
    }
    if (methods_set && cfg.methods.empty())
        throw std::runtime_error("config: methods list is empty");
    cfg.raw_text = raw.str();
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    return parse_config(in);
}

void validate_config(const RunConfig& cfg) {
    namespace fs = std::filesystem;
    if (cfg.fcidump_path.empty()) throw std::runtime_error("config: missing [files] fcidump");
    if (!fs::exists(cfg.fcidump_path))
        throw std::runtime_error("config: fcidump file does not exist: " + cfg.fcidump_path);
    if (cfg.dipole_path.empty()) throw std::runtime_error("config: missing [files] dipole");
    if (!fs::exists(cfg.dipole_path))
        throw std::runtime_error("config: dipole file does not exist: " + cfg.dipole_path);
    {
        std::vector<int> fc = cfg.freeze_core;
        std::sort(fc.begin(), fc.end());
        if (std::adjacent_find(fc.begin(), fc.end()) != fc.end())
            throw std::runtime_error("config: overlapping frozen-core orbitals");
    }
    for (const auto& [mode, occ] : cfg.frozen_modes)
        if (occ != 0 && occ != 1)
            throw std::runtime_error("config: frozen mode occupation must be 0 or 1");
    if (cfg.noise.q < 0.0 || cfg.noise.q >= 1.0)
        throw std::runtime_error("config: q must be in [0, 1)");
    if (cfg.noise.shots_per_group < 0) throw std::runtime_error("config: negative shot count");
    if (cfg.n_resamples < 2) throw std::runtime_error("config: resamples must be at least 2");
    if (cfg.methods.empty()) throw std::runtime_error("config: empty methods list");
    if (cfg.grid.empty()) throw std::runtime_error("config: empty delta grid");
    for (double d : cfg.grid)
        if (!(d > 0.0)) throw std::runtime_error("config: delta grid must be strictly positive");
    for (size_t i = 0; i + 1 < cfg.grid.size(); ++i)
        if (!(cfg.grid[i] < cfg.grid[i + 1]))
            throw std::runtime_error("config: delta grid must be strictly increasing");
    if (cfg.max_annihilators != "auto" && cfg.max_annihilators != "off") {
        try {
            if (std::stoi(cfg.max_annihilators) < 0) throw std::exception();
        } catch (const std::exception&) {
            throw std::runtime_error("config: max_annihilators must be auto, off, or a count");
        }
    }
}

namespace {

// reassemble a PauliSum from a MeasuredOperators coefficient row
PauliSum rebuild_active(const std::vector<std::pair<uint32_t, double>>& row,
                        const std::vector<PauliWord>& words, double id_coeff, int n_qubits) {
    PauliSum ps(n_qubits);
    ps.add(PauliWord{}, id_coeff);
    for (const auto& [idx, coeff] : row) ps.add(words[idx], coeff);
    return ps;
}

}  // namespace

std::string default_config_text() {
    return
        "# moments-based dipole estimation run configuration (defaults)\n"
        "[files]\n"
        "fcidump = \n"
        "dipole = \n"
        "\n"
        "[space]\n"
        "# integral-level frozen spatial orbitals (comma list, 0-based)\n"
        "freeze_core = \n"
        "# moment-level frozen modes as mode:occupation pairs, e.g. 0:1,1:1\n"
        "frozen_modes = \n"
        "# annihilator cap in Wick products: auto (= electron count) | off | <int>\n"
        "max_annihilators = auto\n"
        "\n"
        "[ansatz]\n"
        "# auto = lowest modes of the active space\n"
        "occupied = auto\n"
        "# auto = all spin-projection-conserving doubles; else 'i j -> a b ; ...'\n"
        "excitations = auto\n"
        "# optimize | comma list of angles\n"
        "thetas = optimize\n"
        "vqe_seed = 1\n"
        "\n"
        "[noise]\n"
        "enabled = false\n"
        "q = 0.0\n"
        "shots = 25000\n"
        "seed = 7\n"
        "resamples = 100\n"
        "\n"
        "[scan]\n"
        "methods = B,C,D,E\n"
        "# 'log <lo> <hi> <n>' or an explicit comma list\n"
        "grid = log 1e-4 1e-1 24\n"
        "\n"
        "[output]\n"
        "dir = out\n";
}

PreparedRun prepare_run(const RunConfig& cfg, const std::string& reuse_dir) {
    validate_config(cfg);
    PreparedRun run;
    MolecularIntegrals mi_raw = parse_fcidump_file(cfg.fcidump_path);
    DipoleIntegrals di_raw = parse_dipole_path(cfg.dipole_path);
    if (mi_raw.n_orb != di_raw.n_orb)
        throw std::runtime_error("prepare_run: fcidump and dipole orbital counts differ");
    run.mi = freeze_core_integrals(mi_raw, cfg.freeze_core);
    run.di = freeze_core_dipole(di_raw, cfg.freeze_core);
    run.h_ferm = build_hamiltonian(run.mi);
    run.mu_ferm = build_dipole(run.di);
    run.h_qubit = jordan_wigner(run.h_ferm);
    run.mu_qubit = jordan_wigner(run.mu_ferm);

    const int n_modes = 2 * run.mi.n_orb;
    for (const auto& [mode, occ] : cfg.frozen_modes)
        if (mode < 0 || mode >= n_modes)
            throw std::runtime_error("prepare_run: frozen mode out of range");
    int frozen_elec = 0;
    for (const auto& [mode, occ] : cfg.frozen_modes) frozen_elec += occ;
    run.n_active_modes = n_modes - static_cast<int>(cfg.frozen_modes.size());
    run.n_active_elec = run.mi.n_elec - frozen_elec;
    if (run.n_active_elec < 0 || run.n_active_elec > run.n_active_modes)
        throw std::runtime_error("prepare_run: active electron count out of range");

    std::optional<int> max_ann;
    if (cfg.max_annihilators == "auto") max_ann = run.mi.n_elec;
    else if (cfg.max_annihilators != "off") max_ann = std::stoi(cfg.max_annihilators);
    std::optional<int> post_freeze_ann;
    if (cfg.max_annihilators == "auto") post_freeze_ann = run.n_active_elec;

    run.ops = std::make_shared<MeasuredOperators>(MeasuredOperators::build(
        coefficient_operators(run.h_ferm, run.mu_ferm, cfg.frozen_modes, max_ann,
                              post_freeze_ann)));

    // active-space reference determinant
    run.active_occupied = cfg.occupied;
    if (run.active_occupied.empty())
        for (int i = 0; i < run.n_active_elec; ++i) run.active_occupied.push_back(i);
    StateVector ref = hf_state(run.n_active_modes, run.active_occupied);

    // ansatz: default is every spin-projection-conserving double excitation
    run.ansatz.occupied = run.active_occupied;
    run.ansatz.excitations = cfg.excitations;
    if (run.ansatz.excitations.empty() && !cfg.hf_trial) {
        std::vector<bool> occ(run.n_active_modes, false);
        for (int m : run.active_occupied) occ[m] = true;
        auto spin = [](int m) { return m % 2; };
        for (int i = 0; i < run.n_active_modes; ++i)
            for (int j = i + 1; j < run.n_active_modes; ++j)
                for (int a = 0; a < run.n_active_modes; ++a)
                    for (int b = a + 1; b < run.n_active_modes; ++b) {
                        if (!occ[i] || !occ[j] || occ[a] || occ[b]) continue;
                        if (spin(i) + spin(j) != spin(a) + spin(b)) continue;
                        run.ansatz.excitations.push_back({i, j, a, b});
                    }
    }
    run.ansatz.thetas.assign(run.ansatz.excitations.size(), 0.0);
    if (!cfg.optimize_thetas) {
        if (cfg.thetas.size() != run.ansatz.excitations.size())
            throw std::runtime_error("prepare_run: theta count does not match excitations");
        run.ansatz.thetas = cfg.thetas;
    } else if (!run.ansatz.excitations.empty()) {
        // the VQE objective is the active-space Hamiltonian C_{1,0}
        PauliSum h_active = rebuild_active(run.ops->rows[pk_index(1, 0)], run.ops->words,
                                           run.ops->id_coeff[pk_index(1, 0)], run.n_active_modes);
        VqeOptions opt;
        opt.seed = cfg.vqe_seed;
        VqeResult res = vqe_optimize(run.ansatz, h_active, opt);
        run.ansatz = res.spec;
    }
    StateVector trial = uccd_state(run.ansatz, run.n_active_modes);
    run.trial_state = trial;
    run.ref_state = ref;

    // estimation context
    run.ctx.ops = run.ops;
    NoiseSpec exact_spec;  // q = 0, analytic
    exact_spec.shots_per_group = 0;
    if (!cfg.noise.enabled) {
        run.ctx.noisy = false;
        run.ctx.trial = sample_table(*run.ops, trial, exact_spec, StateLabel::trial);
        run.ctx.ref_exact =
            sample_table(*run.ops, ref, exact_spec, StateLabel::reference).table;
    } else {
        run.ctx.noisy = true;
        NoiseSpec noisy_spec = cfg.noise;
        if (!reuse_dir.empty() && sampled_exists(reuse_dir, StateLabel::trial) &&
            sampled_exists(reuse_dir, StateLabel::reference)) {
            run.ctx.trial = load_sampled(reuse_dir, *run.ops, StateLabel::trial);
            run.ctx.ref_noisy = load_sampled(reuse_dir, *run.ops, StateLabel::reference);
        } else {
            run.ctx.trial = sample_table(*run.ops, trial, noisy_spec, StateLabel::trial);
            run.ctx.ref_noisy = sample_table(*run.ops, ref, noisy_spec, StateLabel::reference);
        }
        run.ctx.ref_exact =
            sample_table(*run.ops, ref, exact_spec, StateLabel::reference).table;
    }

    // FCI / HF references in the pre-moment-freezing space
    std::vector<int> big_occ;
    for (int i = 0; i < run.mi.n_elec; ++i) big_occ.push_back(i);
    run.refs = references(run.h_qubit, run.mu_qubit, run.mi.n_elec, run.mi.ms2, big_occ);
    return run;
}

}  // namespace qcm

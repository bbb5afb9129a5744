#include "qcm/noise.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

namespace qcm {

namespace {

uint64_t label_salt(StateLabel label) {
    return label == StateLabel::trial ? 0x74726961ULL : 0x72656665ULL;
}

}  // namespace

MeasuredOperators MeasuredOperators::build(const std::array<PauliSum, kNumCoefficients>& ops) {
    MeasuredOperators mo;
    mo.n_qubits = 0;
    for (const PauliSum& ps : ops) mo.n_qubits = std::max(mo.n_qubits, ps.n_qubits());

    std::vector<PauliWord> all;
    for (const PauliSum& ps : ops)
        for (const auto& [w, c] : ps.terms())
            if (!w.is_identity()) all.push_back(w);
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());
    mo.words = std::move(all);

    std::unordered_map<PauliWord, uint32_t, PauliWordHash> index;
    index.reserve(mo.words.size() * 2);
    for (uint32_t i = 0; i < mo.words.size(); ++i) index.emplace(mo.words[i], i);

    for (int pk = 0; pk < kNumCoefficients; ++pk) {
        for (const auto& [w, c] : ops[pk].sorted_terms()) {
            if (std::abs(c.imag()) > 1e-9)
                throw std::runtime_error("MeasuredOperators: non-Hermitian coefficient operator");
            if (w.is_identity())
                mo.id_coeff[pk] = c.real();
            else
                mo.rows[pk].emplace_back(index.at(w), c.real());
        }
    }
    mo.groups = group_qubitwise_commuting(mo.words);
    return mo;
}

double MeasuredOperators::mixed_moment(int p, double lambda, bool truncate) const {
    long double acc = 0.0L, lam_k = 1.0L;
    const int kmax = truncate ? std::min(p, 1) : p;
    for (int k = 0; k <= kmax; ++k) {
        acc += lam_k * static_cast<long double>(id_coeff[pk_index(p, k)]);
        lam_k *= lambda;
    }
    return static_cast<double>(acc);
}

namespace {

// single-qubit basis-change gates bringing the group basis to Z
void rotate_to_basis(StateVector& v, const PauliWord& basis) {
    const size_t dim = v.dim();
    for (int q = 0; q < v.n_qubits; ++q) {
        const char letter = basis.letter(q);
        if (letter == 'I' || letter == 'Z') continue;
        const size_t qb = size_t(1) << q;
        if (letter == 'Y') {  // S-dagger, then H
            for (size_t i = 0; i < dim; ++i)
                if (i & qb) v.amps[i] *= cplx(0, -1);
        }
        const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
        for (size_t i = 0; i < dim; ++i) {
            if (i & qb) continue;
            const cplx a = v.amps[i], b = v.amps[i | qb];
            v.amps[i] = (a + b) * inv_sqrt2;
            v.amps[i | qb] = (a - b) * inv_sqrt2;
        }
    }
}

std::vector<double> probabilities(const StateVector& v) {
    std::vector<double> p(v.dim());
    for (size_t i = 0; i < v.dim(); ++i) p[i] = std::norm(v.amps[i]);
    return p;
}

double estimate_from_counts(const GroupCounts& gc, uint64_t support, long shots) {
    long acc = 0;
    for (const auto& [bits, cnt] : gc.bins)
        acc += (popcount64(bits & support) & 1) ? -static_cast<long>(cnt)
                                                : static_cast<long>(cnt);
    return static_cast<double>(acc) / static_cast<double>(shots);
}

void assemble_table(const MeasuredOperators& ops, SampledTable& st) {
    for (int p = 1; p <= kMaxMomentOrder; ++p)
        for (int k = 0; k <= p; ++k) {
            const int pk = pk_index(p, k);
            long double acc = ops.id_coeff[pk];
            for (const auto& [idx, coeff] : ops.rows[pk])
                acc += static_cast<long double>(coeff) * st.word_est[idx];
            st.table.at(p, k) = static_cast<double>(acc);
        }
}

}  // namespace

SampledTable sample_table(const MeasuredOperators& ops, const StateVector& state,
                          const NoiseSpec& spec, StateLabel label) {
    if (spec.q < 0.0 || spec.q >= 1.0)
        throw std::runtime_error("sample_table: q must be in [0, 1)");
    if (spec.shots_per_group < 0) throw std::runtime_error("sample_table: negative shot count");
    SampledTable st;
    st.spec = spec;
    st.table.state = label;
    st.word_est.assign(ops.words.size(), 0.0);

    if (spec.shots_per_group == 0) {
        // analytic channel: <P> -> (1-q) <P> for non-identity P
        st.table.provenance = Provenance::exact;
        for (size_t i = 0; i < ops.words.size(); ++i)
            st.word_est[i] = (1.0 - spec.q) * word_expectation(ops.words[i], state);
        assemble_table(ops, st);
        return st;
    }

    st.table.provenance = Provenance::sampled;
    st.counts.resize(ops.groups.size());
    const size_t dim = state.dim();
    const uint64_t mask = dim - 1;
    std::vector<uint32_t> hist(dim);
    for (size_t gi = 0; gi < ops.groups.size(); ++gi) {
        StateVector rotated = state;
        rotate_to_basis(rotated, ops.groups[gi].basis);
        std::vector<double> prob = probabilities(rotated);
        std::vector<double> cdf(prob.size());
        double run = 0.0;
        for (size_t i = 0; i < prob.size(); ++i) {
            run += prob[i];
            cdf[i] = run;
        }
        // per-group counter-based substream: schedule independent
        std::mt19937_64 rng(stream_seed(spec.seed ^ label_salt(label), gi));
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        std::fill(hist.begin(), hist.end(), 0);
        for (long s = 0; s < spec.shots_per_group; ++s) {
            uint64_t bits;
            if (uni(rng) < spec.q) {
                bits = rng() & mask;  // white noise: uniform random outcome
            } else {
                double u = uni(rng) * run;
                bits = static_cast<uint64_t>(
                    std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
                if (bits >= dim) bits = dim - 1;
            }
            ++hist[bits];
        }
        GroupCounts& gc = st.counts[gi];
        for (size_t b = 0; b < dim; ++b)
            if (hist[b]) gc.bins.emplace_back(static_cast<uint32_t>(b), hist[b]);
    }
    rederive_from_counts(ops, st);
    return st;
}

void rederive_from_counts(const MeasuredOperators& ops, SampledTable& st) {
    if (!st.has_counts()) throw std::runtime_error("rederive_from_counts: no counts present");
    st.word_est.assign(ops.words.size(), 0.0);
    for (size_t gi = 0; gi < ops.groups.size(); ++gi)
        for (uint32_t wi : ops.groups[gi].members)
            st.word_est[wi] =
                estimate_from_counts(st.counts[gi], ops.words[wi].support(), st.spec.shots_per_group);
    assemble_table(ops, st);
}

Calibration calibrate(double noisy_ref, double exact_ref, double mixed) {
    if (!std::isfinite(noisy_ref) || !std::isfinite(exact_ref) || !std::isfinite(mixed))
        throw std::runtime_error("calibrate: non-finite input");
    constexpr double eps = 1e-10;
    constexpr double q_ceiling = 1.0 - 1e-6;
    Calibration cal;
    const double den = exact_ref - mixed;
    const double scale = std::max({1.0, std::abs(exact_ref), std::abs(mixed)});
    if (std::abs(den) < eps * scale) {
        cal.degenerate = true;  // no unique solution for q
        cal.q = 0.0;
        return cal;
    }
    cal.q = (exact_ref - noisy_ref) / den;
    if (cal.q > q_ceiling) {
        cal.q = q_ceiling;
        cal.clamped = true;
    }
    return cal;
}

double mitigate(double noisy, double mixed, double q) {
    if (q >= 1.0) throw std::runtime_error("mitigate: q >= 1");
    return (noisy - q * mixed) / (1.0 - q);
}

const char* method_name(Method m) {
    switch (m) {
        case Method::A: return "A";
        case Method::B: return "B";
        case Method::C: return "C";
        case Method::D: return "D";
        case Method::E: return "E";
    }
    return "?";
}

Method method_from_name(const std::string& s) {
    if (s == "A" || s == "a") return Method::A;
    if (s == "B" || s == "b") return Method::B;
    if (s == "C" || s == "c") return Method::C;
    if (s == "D" || s == "d") return Method::D;
    if (s == "E" || s == "e") return Method::E;
    throw std::runtime_error("unknown method '" + s + "' (expected A..E)");
}

bool method_truncates(Method m) { return m == Method::D || m == Method::E; }

namespace {

// Method A: fold numeric lambda into per-word coefficients, then estimate.
double numeric_lambda_moment(const MeasuredOperators& ops, const SampledTable& st, int p,
                             double lambda) {
    std::vector<long double> merged(ops.words.size(), 0.0L);
    std::vector<uint32_t> touched;
    long double id = 0.0L, lam_k = 1.0L;
    for (int k = 0; k <= p; ++k) {
        const int pk = pk_index(p, k);
        id += lam_k * static_cast<long double>(ops.id_coeff[pk]);
        for (const auto& [idx, coeff] : ops.rows[pk]) {
            if (merged[idx] == 0.0L) touched.push_back(idx);
            merged[idx] += lam_k * static_cast<long double>(coeff);
        }
        lam_k *= lambda;
    }
    std::sort(touched.begin(), touched.end());
    long double acc = id;
    for (uint32_t idx : touched) acc += merged[idx] * st.word_est[idx];
    return static_cast<double>(acc);
}

}  // namespace

MethodMoments method_tables(Method method, const SampledTable& trial,
                            const SampledTable& ref_noisy, const CoefficientTable& ref_exact,
                            const MeasuredOperators& ops, double lambda) {
    if (!std::isfinite(lambda)) throw std::runtime_error("method_tables: non-finite lambda");
    MethodMoments out;
    out.moments.lambda = lambda;
    out.moments.truncated = method_truncates(method);
    const bool trunc = method_truncates(method);

    switch (method) {
        case Method::A: {
            MomentSet ref_ex = assemble_moments(ref_exact, lambda, false);
            for (int p = 1; p <= kMaxMomentOrder; ++p) {
                double noisy_t = numeric_lambda_moment(ops, trial, p, lambda);
                double noisy_r = numeric_lambda_moment(ops, ref_noisy, p, lambda);
                double mixed = ops.mixed_moment(p, lambda, false);
                Calibration cal = calibrate(noisy_r, ref_ex.m[p], mixed);
                out.calibration.entries.push_back({p, -1, cal.q, cal.degenerate, cal.clamped});
                out.moments.m[p] = mitigate(noisy_t, mixed, cal.q);
            }
            break;
        }
        case Method::B:
        case Method::D: {
            MomentSet m_trial = assemble_moments(trial.table, lambda, trunc);
            MomentSet m_ref = assemble_moments(ref_noisy.table, lambda, trunc);
            MomentSet m_exact = assemble_moments(ref_exact, lambda, trunc);
            for (int p = 1; p <= kMaxMomentOrder; ++p) {
                double mixed = ops.mixed_moment(p, lambda, trunc);
                Calibration cal = calibrate(m_ref.m[p], m_exact.m[p], mixed);
                out.calibration.entries.push_back({p, -1, cal.q, cal.degenerate, cal.clamped});
                out.moments.m[p] = mitigate(m_trial.m[p], mixed, cal.q);
            }
            break;
        }
        case Method::C:
        case Method::E: {
            CoefficientTable mitigated = trial.table;
            for (int p = 1; p <= kMaxMomentOrder; ++p)
                for (int k = 0; k <= (trunc ? std::min(p, 1) : p); ++k) {
                    const int pk = pk_index(p, k);
                    Calibration cal = calibrate(ref_noisy.table.at(p, k), ref_exact.at(p, k),
                                                ops.id_coeff[pk]);
                    out.calibration.entries.push_back({p, k, cal.q, cal.degenerate, cal.clamped});
                    mitigated.at(p, k) =
                        mitigate(trial.table.at(p, k), ops.id_coeff[pk], cal.q);
                }
            MomentSet ms = assemble_moments(mitigated, lambda, trunc);
            for (int p = 1; p <= kMaxMomentOrder; ++p) out.moments.m[p] = ms.m[p];
            break;
        }
    }
    return out;
}

namespace {

GroupCounts resample_counts(const GroupCounts& src, long shots, std::mt19937_64& rng) {
    // exact multinomial redraw via the conditional-binomial chain
    double weight_rest = 0.0;
    for (const auto& [bits, cnt] : src.bins) weight_rest += static_cast<double>(cnt);
    GroupCounts out;
    long remaining = shots;
    for (size_t i = 0; i < src.bins.size() && remaining > 0; ++i) {
        const double w = static_cast<double>(src.bins[i].second);
        long k;
        if (i + 1 == src.bins.size() || w >= weight_rest) {
            k = remaining;
        } else {
            std::binomial_distribution<long> bin(remaining, w / weight_rest);
            k = bin(rng);
        }
        if (k > 0) out.bins.emplace_back(src.bins[i].first, static_cast<uint32_t>(k));
        remaining -= k;
        weight_rest -= w;
    }
    return out;
}

}  // namespace

BootstrapStats bootstrap(
    const std::function<std::vector<double>(const std::vector<SampledTable>&)>& run,
    const std::vector<SampledTable>& tables, const MeasuredOperators& ops, int n_resamples,
    uint64_t seed) {
    if (n_resamples < 2) throw std::runtime_error("bootstrap: need at least 2 resamples");
    for (const SampledTable& t : tables)
        if (!t.has_counts())
            throw std::runtime_error("bootstrap requires sampled data (no raw counts present)");

    std::vector<std::vector<double>> outputs(n_resamples);
    parallel_for(static_cast<size_t>(n_resamples), [&](size_t r) {
        std::vector<SampledTable> resampled = tables;
        for (size_t ti = 0; ti < resampled.size(); ++ti) {
            // stream identity = (resample, table, group): schedule independent
            for (size_t gi = 0; gi < resampled[ti].counts.size(); ++gi) {
                std::mt19937_64 rng(stream_seed(
                    seed, (static_cast<uint64_t>(r) << 24) ^ (static_cast<uint64_t>(ti) << 20) ^ gi));
                resampled[ti].counts[gi] =
                    resample_counts(tables[ti].counts[gi], tables[ti].spec.shots_per_group, rng);
            }
            rederive_from_counts(ops, resampled[ti]);
        }
        outputs[r] = run(resampled);
    });
    const size_t n_out = outputs[0].size();
    BootstrapStats stats;
    stats.n_resamples = n_resamples;
    stats.mean.assign(n_out, 0.0);
    stats.stddev.assign(n_out, 0.0);
    for (const auto& o : outputs)
        for (size_t i = 0; i < n_out; ++i) stats.mean[i] += o[i];
    for (double& m : stats.mean) m /= n_resamples;
    for (const auto& o : outputs)
        for (size_t i = 0; i < n_out; ++i) {
            double d = o[i] - stats.mean[i];
            stats.stddev[i] += d * d;
        }
    for (double& s : stats.stddev) s = std::sqrt(s / (n_resamples - 1));
    stats.replicates = std::move(outputs);
    return stats;
}

std::pair<double, double> bootstrap_scalar(
    const std::function<double(const std::vector<SampledTable>&)>& run,
    const std::vector<SampledTable>& tables, const MeasuredOperators& ops, int n_resamples,
    uint64_t seed) {
    BootstrapStats stats = bootstrap(
        [&](const std::vector<SampledTable>& ts) { return std::vector<double>{run(ts)}; }, tables,
        ops, n_resamples, seed);
    return {stats.mean[0], stats.stddev[0]};
}

// ---------------------------------------------------------------------------
// persistence

namespace {

std::string label_tag(StateLabel label) {
    return label == StateLabel::trial ? "trial" : "reference";
}

}  // namespace

void save_sampled(const std::string& dir, const MeasuredOperators& ops, const SampledTable& st,
                  StateLabel label) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    const std::string tag = label_tag(label);
    {
        std::ofstream out(dir + "/" + tag + "_spec.txt");
        out.precision(17);
        out << "q " << st.spec.q << "\nshots " << st.spec.shots_per_group << "\nseed "
            << st.spec.seed << "\nn_groups " << st.counts.size() << "\n";
    }
    {
        std::ofstream out(dir + "/" + tag + "_groups.txt");
        out << "# group basis members...\n";
        PauliSum dummy(ops.n_qubits);
        for (size_t gi = 0; gi < ops.groups.size(); ++gi) {
            out << gi << " " << dummy.word_string(ops.groups[gi].basis);
            for (uint32_t wi : ops.groups[gi].members) out << " " << dummy.word_string(ops.words[wi]);
            out << "\n";
        }
    }
    {
        std::ofstream out(dir + "/" + tag + "_counts.txt");
        out << "# group bitstring count\n";
        for (size_t gi = 0; gi < st.counts.size(); ++gi)
            for (const auto& [bits, cnt] : st.counts[gi].bins)
                out << gi << " " << bits << " " << cnt << "\n";
    }
    {
        std::ofstream out(dir + "/" + tag + "_table.txt");
        out << write_table(st.table);
    }
}

bool sampled_exists(const std::string& dir, StateLabel label) {
    namespace fs = std::filesystem;
    const std::string tag = label_tag(label);
    return fs::exists(dir + "/" + tag + "_spec.txt") && fs::exists(dir + "/" + tag + "_counts.txt");
}

SampledTable load_sampled(const std::string& dir, const MeasuredOperators& ops, StateLabel label) {
    const std::string tag = label_tag(label);
    SampledTable st;
    st.table.state = label;
    st.table.provenance = Provenance::sampled;
    size_t n_groups = 0;
    {
        std::ifstream in(dir + "/" + tag + "_spec.txt");
        if (!in) throw std::runtime_error("load_sampled: missing spec file in " + dir);
        std::string key;
        while (in >> key) {
            if (key == "q") in >> st.spec.q;
            else if (key == "shots") in >> st.spec.shots_per_group;
            else if (key == "seed") in >> st.spec.seed;
            else if (key == "n_groups") in >> n_groups;
        }
        st.spec.enabled = true;
    }
    if (n_groups != ops.groups.size())
        throw std::runtime_error("load_sampled: group count mismatch with prepared operators");
    st.counts.resize(n_groups);
    {
        std::ifstream in(dir + "/" + tag + "_counts.txt");
        if (!in) throw std::runtime_error("load_sampled: missing counts file in " + dir);
        std::string line;
        while (std::getline(in, line)) {
            std::string t = trim(line);
            if (t.empty() || t[0] == '#') continue;
            std::istringstream ls(t);
            size_t gi;
            uint32_t bits, cnt;
            if (!(ls >> gi >> bits >> cnt)) throw std::runtime_error("load_sampled: bad counts row");
            if (gi >= n_groups) throw std::runtime_error("load_sampled: group index out of range");
            st.counts[gi].bins.emplace_back(bits, cnt);
        }
    }
    for (const GroupCounts& gc : st.counts) {
        long total = 0;
        for (const auto& [bits, cnt] : gc.bins) total += cnt;
        if (total != st.spec.shots_per_group)
            throw std::runtime_error("load_sampled: counts do not sum to shots_per_group");
    }
    rederive_from_counts(ops, st);
    // cross-check against the stored table
    std::ifstream tin(dir + "/" + tag + "_table.txt");
    if (tin) {
        CoefficientTable stored = read_table(tin);
        for (int p = 1; p <= kMaxMomentOrder; ++p)
            for (int k = 0; k <= p; ++k)
                if (std::abs(stored.at(p, k) - st.table.at(p, k)) > 1e-12)
                    throw std::runtime_error("load_sampled: rederived table disagrees with stored");
    }
    return st;
}

}  // namespace qcm

#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "qcm/moments.hpp"
#include "qcm/state.hpp"

namespace qcm {

/// Synthetic backend settings: a global white-noise (depolarizing) channel of
/// strength q plus multinomial shot sampling. shots_per_group = 0 selects the
/// analytic mode, where the channel is applied exactly.
struct NoiseSpec {
    double q = 0.0;
    long shots_per_group = 25000;
    uint64_t seed = 0;
    bool enabled = false;
};

/// The per-(p,k) coefficient operators prepared for measurement: a shared
/// deduplicated word list, its qubit-wise commuting groups, and per-operator
/// sparse coefficient rows over that list.
struct MeasuredOperators {
    int n_qubits = 0;
    std::vector<PauliWord> words;  // sorted, identity excluded
    std::vector<MeasurementGroup> groups;
    std::array<std::vector<std::pair<uint32_t, double>>, kNumCoefficients> rows;
    std::array<double, kNumCoefficients> id_coeff{};

    static MeasuredOperators build(const std::array<PauliSum, kNumCoefficients>& ops);

    /// Identity-component (maximally mixed) moment: sum_k lambda^k id[p][k].
    double mixed_moment(int p, double lambda, bool truncate) const;
};

/// Sparse histogram of measured bitstrings for one group, in the group's
/// rotated basis.
struct GroupCounts {
    std::vector<std::pair<uint32_t, uint32_t>> bins;  // (bitstring, count), sorted
};

/// A coefficient table together with the raw evidence behind it.
struct SampledTable {
    CoefficientTable table;
    std::vector<double> word_est;     // per word in MeasuredOperators::words
    std::vector<GroupCounts> counts;  // empty in analytic mode
    NoiseSpec spec;

    bool has_counts() const { return !counts.empty(); }
};

/// Measures every word of the coefficient operators on the given state under
/// the noise model. Analytic mode scales non-identity expectations by (1-q);
/// sampled mode draws shots_per_group bitstrings per group, each replaced by a
/// uniform random bitstring with probability q. All Paulis of a group are
/// estimated from the same samples.
SampledTable sample_table(const MeasuredOperators& ops, const StateVector& state,
                          const NoiseSpec& spec, StateLabel label);

/// Recomputes word estimates and the table from the stored counts (identical
/// arithmetic to sample_table's assembly).
void rederive_from_counts(const MeasuredOperators& ops, SampledTable& st);

struct Calibration {
    double q = 0.0;
    bool degenerate = false;  // exact_ref ~ mixed: no unique solution, q = 0
    bool clamped = false;     // q pushed below the 1 - eps ceiling
};

/// Inverts noisy = (1-q) exact + q mixed for q.
Calibration calibrate(double noisy_ref, double exact_ref, double mixed);

/// (noisy - q mixed)/(1 - q); throws for q >= 1.
double mitigate(double noisy, double mixed, double q);

enum class Method { A, B, C, D, E };
const char* method_name(Method m);
Method method_from_name(const std::string& s);
bool method_truncates(Method m);  // D and E drop lambda^k, k >= 2

struct CalibrationRecord {
    struct Entry {
        int p;
        int k;  // -1 for a per-moment (assembled) calibration
        double q;
        bool degenerate;
        bool clamped;
    };
    std::vector<Entry> entries;
};

struct MethodMoments {
    MomentSet moments;
    CalibrationRecord calibration;
};

/// Mitigated moments at numeric lambda by one of the five drivers.
/// A: numeric lambda substituted into per-word coefficients before assembly;
/// B: assemble then calibrate per moment ("post-mitigated");
/// C: calibrate each (p,k) coefficient then assemble ("pre-mitigated");
/// D/E: as B/C with the k >= 2 coefficients discarded.
MethodMoments method_tables(Method method, const SampledTable& trial,
                            const SampledTable& ref_noisy, const CoefficientTable& ref_exact,
                            const MeasuredOperators& ops, double lambda);

struct BootstrapStats {
    std::vector<double> mean;
    std::vector<double> stddev;
    std::vector<std::vector<double>> replicates;  // [resample][output]
    int n_resamples = 0;
};

/// Multinomially redraws every group's counts from its empirical distribution,
/// reruns the closure per resample, and reports mean and sample standard
/// deviation per output component. Deterministic given seed regardless of the
/// worker-thread budget; resamples are independent work items, so the closure
/// must be safe for concurrent invocation (it receives its own table copies).
BootstrapStats bootstrap(
    const std::function<std::vector<double>(const std::vector<SampledTable>&)>& run,
    const std::vector<SampledTable>& tables, const MeasuredOperators& ops, int n_resamples,
    uint64_t seed);

/// Scalar-closure convenience wrapper (mean, stddev).
std::pair<double, double> bootstrap_scalar(
    const std::function<double(const std::vector<SampledTable>&)>& run,
    const std::vector<SampledTable>& tables, const MeasuredOperators& ops, int n_resamples,
    uint64_t seed);

/// Persist/load a sampled table as a directory of tabular text files
/// (spec, group membership, counts, estimates). Loading rederives the table
/// from counts and verifies it against the stored values.
void save_sampled(const std::string& dir, const MeasuredOperators& ops, const SampledTable& st,
                  StateLabel label);
SampledTable load_sampled(const std::string& dir, const MeasuredOperators& ops, StateLabel label);
bool sampled_exists(const std::string& dir, StateLabel label);

}  // namespace qcm

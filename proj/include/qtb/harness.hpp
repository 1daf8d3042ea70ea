#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qtb/code_lattice.hpp"
#include "qtb/decoders.hpp"
#include "qtb/noise.hpp"
#include "qtb/stats.hpp"

namespace qtb {

struct GridSpec {
    double start = 0.0, stop = 0.0, step = 0.0;
    // inclusive endpoints; points past stop by more than a relative 1e-9 of
    // one step are dropped rather than rejected
    std::vector<double> points() const;
};

struct SweepSpec {
    Mode mode = Mode::pauli;
    std::vector<DecoderKind> decoders;
    std::vector<int> distances;
    GridSpec grid;
    long long trials = 0;
    uint64_t base_seed = 0;
    int threads = 0;  // 0 resolves to the hardware thread count
    NoiseConfig noise;  // the swept variable (p or sigma) is overwritten per point
    const GuideTable* guide = nullptr;
};

struct SweepPointRecord {
    std::string mode;
    std::string decoder;
    int distance = 0;
    std::string sweep_var;
    double sweep_value = 0.0;
    long long trials = 0;
    long long failures = 0;
    double ler = 0.0, ci_low = 0.0, ci_high = 0.0;
    double mean_defects = 0.0;
    double mean_correction_weight = 0.0;
    double decoder_failure_rate = 0.0;
    double runtime_s = 0.0;  // wall clock, excluded from determinism guarantees
    uint64_t base_seed = 0;
};

struct SkipEntry {
    std::string decoder;
    std::string reason;
};

struct SweepResult {
    std::vector<SweepPointRecord> records;
    std::vector<SkipEntry> skips;
};

// Monte Carlo sweep over (decoder, distance, grid point, trial). Trials are
// sharded across threads; every per-trial stream is seeded from
// (base_seed, distance, grid index, trial index), so failure counts and all
// diagnostics are bit-identical for every thread count. A guided decoder
// without a table is skipped with an entry, never silently substituted.
SweepResult run_sweep(const SweepSpec& spec);

struct FidelityReport {
    double t_serial = 0.0, t_parallel = 0.0;
    double speedup = 0.0;
    double throughput = 0.0;  // trials per second of the parallel run
    std::vector<double> abs_delta;
    double mean_abs = 0.0, max_abs = 0.0;
    double pearson = 0.0;
    int serial_threads = 1, parallel_threads = 0;
    long long total_trials = 0;
};

// Runs the identical sweep twice (serial_threads, then parallel_threads) and
// compares per-point logical error rates on the shared grid.
FidelityReport run_fidelity_study(const SweepSpec& spec, int serial_threads, int parallel_threads);

struct AblationSlope {
    std::string decoder;
    int distance = 0;
    double slope = 0.0;
};

struct AblationResult {
    std::vector<SweepPointRecord> records;
    std::vector<AblationSlope> slopes;
    std::vector<SkipEntry> skips;
};

// One-factor sweep of a single extra channel, component in
// {gate, meas, idle, loss}, all other channels held at base.noise values.
// base.grid is ignored; the record sweep_var is the channel field name.
AblationResult run_ablation(const SweepSpec& base, const std::string& component,
                            const std::vector<double>& levels);

struct CrossingRecord {
    std::string decoder;
    int d_small = 0, d_large = 0;
    double value = 0.0;  // NaN when the curves never change order
};

struct DenseWindowResult {
    std::vector<SweepPointRecord> records;
    std::vector<CrossingRecord> crossings;
    std::vector<SkipEntry> skips;
};

// Full sweep plus the deterministic curve crossing for every distance pair of
// every decoder that produced records.
DenseWindowResult run_dense_window(const SweepSpec& spec);

std::string mode_name(Mode mode);

// Sweep-variable name for a mode: "p" for pauli, "sigma" for gkp.
std::string sweep_var_name(Mode mode);

// Belief-propagation channel prior at one sweep point: the physical flip
// probability (pauli p, or the analytic digitized flip probability at sigma),
// clamped into [1e-9, 0.499].
double bp_prior_for(const NoiseConfig& noise);

// Wilson point estimates for one (decoder, distance) curve, in record order.
std::vector<PointEstimate> curve_estimates(const std::vector<SweepPointRecord>& records,
                                           const std::string& decoder, int distance);

} // namespace qtb

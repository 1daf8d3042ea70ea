#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace qtb {

struct PointEstimate {
    long long trials = 0;
    long long failures = 0;
    double ler = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
};

// Wilson 95% interval, z = 1.9599639845, bounds clamped to [0,1]
PointEstimate wilson_ci(long long failures, long long trials);

// First sign change of delta(x) = a(x) - b(x) scanning from the left; linear
// interpolation inside the bracketing segment; NaN when the curves never
// change order. An exact zero of delta at a grid point returns that point.
double crossing(const std::vector<double>& xs,
                const std::vector<double>& a,
                const std::vector<double>& b);

struct CrossingSummary {
    double median = 0.0, q05 = 0.0, q95 = 0.0;  // NaN when valid_count == 0
    long long valid_count = 0;
    long long total_resamples = 0;
};

// Pointwise binomial bootstrap: per resample, redraw failure counts at every
// grid point of both curves, recompute the crossing, and summarize the
// defined samples with nearest-rank quantiles.
CrossingSummary bootstrap_crossings(const std::vector<double>& xs,
                                    const std::vector<PointEstimate>& a,
                                    const std::vector<PointEstimate>& b,
                                    long long resamples, uint64_t seed);

struct EffectSize {
    double mean_delta = 0.0;
    double ci_low = 0.0, ci_high = 0.0;
};

EffectSize effect_size(const std::vector<PointEstimate>& a,
                       const std::vector<PointEstimate>& b,
                       long long resamples, uint64_t seed);

struct RankBand {
    double q05 = 0.0, q50 = 0.0, q95 = 0.0;
};

// result[decoder][x]; ranks are 1..K ascending by resampled LER, ties broken
// by decoder-name order
std::vector<std::vector<RankBand>> rank_stability(const std::vector<std::string>& names,
                                                  const std::vector<std::vector<PointEstimate>>& curves,
                                                  long long resamples, uint64_t seed);

// elementwise ler_small / ler_large; NaN where the denominator is zero
std::vector<double> distance_gain(const std::vector<PointEstimate>& ler_small,
                                  const std::vector<PointEstimate>& ler_large);

// ordinary least-squares slope of ler against epsilon
double ablation_slope(const std::vector<double>& levels, const std::vector<double>& lers);

struct FidelityDelta {
    std::vector<double> abs_delta;
    double mean_abs = 0.0, max_abs = 0.0;
    double pearson = 0.0;  // NaN when either vector is constant
};

FidelityDelta fidelity_delta(const std::vector<double>& serial,
                             const std::vector<double>& parallel);

// nearest-rank quantile of a sorted sample
double quantile_nearest_rank(const std::vector<double>& sorted, double q);

} // namespace qtb

#include "qtb/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "qtb/rng.hpp"

namespace qtb {

namespace {
constexpr double k_z = 1.9599639845;
const double k_nan = std::numeric_limits<double>::quiet_NaN();

void require_shared_grid(size_t a, size_t b) {
    if (a != b) throw std::invalid_argument("stats: curves are not on a shared grid");
}
} // namespace

PointEstimate wilson_ci(long long failures, long long trials) {
    if (trials < 1) throw std::invalid_argument("wilson_ci: trials must be >= 1");
    if (failures < 0 || failures > trials) throw std::invalid_argument("wilson_ci: failures outside [0, trials]");
    double N = double(trials);
    double ph = double(failures) / N;
    double z2 = k_z * k_z;
    double den = 1.0 + z2 / N;
    double centre = (ph + z2 / (2.0 * N)) / den;
    double half = (k_z / den) * std::sqrt((ph * (1.0 - ph) + z2 / (4.0 * N)) / N);
    PointEstimate pe;
    pe.trials = trials;
    pe.failures = failures;
    pe.ler = ph;
    // the exact interval always brackets ph; repair last-ulp rounding at the ends
    pe.ci_low = std::min(std::max(0.0, centre - half), ph);
    pe.ci_high = std::max(std::min(1.0, centre + half), ph);
    return pe;
}

double crossing(const std::vector<double>& xs,
                const std::vector<double>& a,
                const std::vector<double>& b) {
    require_shared_grid(xs.size(), a.size());
    require_shared_grid(xs.size(), b.size());
    if (xs.size() < 2) throw std::invalid_argument("crossing: need at least 2 grid points");
    const size_t m = xs.size();
    for (size_t k = 0; k < m; ++k) {
        double dk = a[k] - b[k];
        if (dk == 0.0) return xs[k];
        if (k + 1 < m) {
            double dn = a[k + 1] - b[k + 1];
            if ((dk > 0.0 && dn < 0.0) || (dk < 0.0 && dn > 0.0))
                return xs[k] + (xs[k + 1] - xs[k]) * dk / (dk - dn);
        }
    }
    return k_nan;
}

double quantile_nearest_rank(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) return k_nan;
    long long m = (long long)sorted.size();
    long long idx = (long long)std::ceil(q * double(m)) - 1;
    if (idx < 0) idx = 0;
    if (idx >= m) idx = m - 1;
    return sorted[(size_t)idx];
}

namespace {

// redraw one curve's failure counts; returns resampled LERs
void resample_curve(rng::Stream& st, const std::vector<PointEstimate>& c, std::vector<double>& out) {
    out.resize(c.size());
    for (size_t i = 0; i < c.size(); ++i) {
        long long k = rng::binomial(st, c[i].trials, c[i].ler);
        out[i] = double(k) / double(c[i].trials);
    }
}

} // namespace

CrossingSummary bootstrap_crossings(const std::vector<double>& xs,
                                    const std::vector<PointEstimate>& a,
                                    const std::vector<PointEstimate>& b,
                                    long long resamples, uint64_t seed) {
    require_shared_grid(xs.size(), a.size());
    require_shared_grid(xs.size(), b.size());
    if (resamples < 1) throw std::invalid_argument("bootstrap_crossings: resamples must be >= 1");
    std::vector<double> ra, rb, found;
    for (long long r = 0; r < resamples; ++r) {
        rng::Stream st(rng::mix(seed, (uint64_t)r));
        resample_curve(st, a, ra);
        resample_curve(st, b, rb);
        double x = crossing(xs, ra, rb);
        if (!std::isnan(x)) found.push_back(x);
    }
    std::sort(found.begin(), found.end());
    CrossingSummary s;
    s.total_resamples = resamples;
    s.valid_count = (long long)found.size();
    s.median = quantile_nearest_rank(found, 0.5);
    s.q05 = quantile_nearest_rank(found, 0.05);
    s.q95 = quantile_nearest_rank(found, 0.95);
    return s;
}

EffectSize effect_size(const std::vector<PointEstimate>& a,
                       const std::vector<PointEstimate>& b,
                       long long resamples, uint64_t seed) {
    require_shared_grid(a.size(), b.size());
    if (a.empty()) throw std::invalid_argument("effect_size: empty grid");
    if (resamples < 1) throw std::invalid_argument("effect_size: resamples must be >= 1");
    double mean = 0.0;
    for (size_t i = 0; i < a.size(); ++i) mean += a[i].ler - b[i].ler;
    mean /= double(a.size());

    std::vector<double> ra, rb, deltas;
    deltas.reserve((size_t)resamples);
    for (long long r = 0; r < resamples; ++r) {
        rng::Stream st(rng::mix(seed, (uint64_t)r));
        resample_curve(st, a, ra);
        resample_curve(st, b, rb);
        double d = 0.0;
        for (size_t i = 0; i < ra.size(); ++i) d += ra[i] - rb[i];
        deltas.push_back(d / double(ra.size()));
    }
    std::sort(deltas.begin(), deltas.end());
    EffectSize e;
    e.mean_delta = mean;
    e.ci_low = std::min(quantile_nearest_rank(deltas, 0.025), mean);
    e.ci_high = std::max(quantile_nearest_rank(deltas, 0.975), mean);
    return e;
}

std::vector<std::vector<RankBand>> rank_stability(const std::vector<std::string>& names,
                                                  const std::vector<std::vector<PointEstimate>>& curves,
                                                  long long resamples, uint64_t seed) {
    if (curves.size() < 2) throw std::invalid_argument("rank_stability: need >= 2 decoders");
    if (names.size() != curves.size()) throw std::invalid_argument("rank_stability: names/curves mismatch");
    const size_t K = curves.size();
    const size_t M = curves[0].size();
    for (const auto& c : curves) require_shared_grid(M, c.size());
    if (resamples < 1) throw std::invalid_argument("rank_stability: resamples must be >= 1");

    // ranks[k][x] collects one rank value per resample
    std::vector<std::vector<std::vector<double>>> ranks(K, std::vector<std::vector<double>>(M));
    std::vector<std::vector<double>> rler(K);
    std::vector<size_t> order(K);
    for (long long r = 0; r < resamples; ++r) {
        rng::Stream st(rng::mix(seed, (uint64_t)r));
        for (size_t k = 0; k < K; ++k) resample_curve(st, curves[k], rler[k]);
        for (size_t x = 0; x < M; ++x) {
            for (size_t k = 0; k < K; ++k) order[k] = k;
            std::sort(order.begin(), order.end(), [&](size_t i, size_t j) {
                if (rler[i][x] != rler[j][x]) return rler[i][x] < rler[j][x];
                return names[i] < names[j];
            });
            for (size_t pos = 0; pos < K; ++pos)
                ranks[order[pos]][x].push_back(double(pos + 1));
        }
    }

    std::vector<std::vector<RankBand>> out(K, std::vector<RankBand>(M));
    for (size_t k = 0; k < K; ++k)
        for (size_t x = 0; x < M; ++x) {
            auto& v = ranks[k][x];
            std::sort(v.begin(), v.end());
            out[k][x] = {quantile_nearest_rank(v, 0.05),
                         quantile_nearest_rank(v, 0.5),
                         quantile_nearest_rank(v, 0.95)};
        }
    return out;
}

std::vector<double> distance_gain(const std::vector<PointEstimate>& ler_small,
                                  const std::vector<PointEstimate>& ler_large) {
    require_shared_grid(ler_small.size(), ler_large.size());
    std::vector<double> out(ler_small.size());
    for (size_t i = 0; i < out.size(); ++i)
        out[i] = ler_large[i].ler == 0.0 ? k_nan : ler_small[i].ler / ler_large[i].ler;
    return out;
}

double ablation_slope(const std::vector<double>& levels, const std::vector<double>& lers) {
    require_shared_grid(levels.size(), lers.size());
    if (levels.size() < 2) throw std::invalid_argument("ablation_slope: need >= 2 levels");
    double mx = 0.0, my = 0.0;
    for (size_t i = 0; i < levels.size(); ++i) { mx += levels[i]; my += lers[i]; }
    mx /= double(levels.size());
    my /= double(levels.size());
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < levels.size(); ++i) {
        num += (levels[i] - mx) * (lers[i] - my);
        den += (levels[i] - mx) * (levels[i] - mx);
    }
    if (den == 0.0) throw std::invalid_argument("ablation_slope: all levels identical");
    return num / den;
}

FidelityDelta fidelity_delta(const std::vector<double>& serial,
                             const std::vector<double>& parallel) {
    require_shared_grid(serial.size(), parallel.size());
    if (serial.empty()) throw std::invalid_argument("fidelity_delta: empty grid");
    FidelityDelta f;
    f.abs_delta.resize(serial.size());
    for (size_t i = 0; i < serial.size(); ++i) {
        f.abs_delta[i] = std::fabs(serial[i] - parallel[i]);
        f.mean_abs += f.abs_delta[i];
        f.max_abs = std::max(f.max_abs, f.abs_delta[i]);
    }
    f.mean_abs /= double(serial.size());

    double ma = 0.0, mb = 0.0;
    for (size_t i = 0; i < serial.size(); ++i) { ma += serial[i]; mb += parallel[i]; }
    ma /= double(serial.size());
    mb /= double(serial.size());
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (size_t i = 0; i < serial.size(); ++i) {
        sab += (serial[i] - ma) * (parallel[i] - mb);
        saa += (serial[i] - ma) * (serial[i] - ma);
        sbb += (parallel[i] - mb) * (parallel[i] - mb);
    }
    f.pearson = (saa == 0.0 || sbb == 0.0) ? k_nan : sab / std::sqrt(saa * sbb);
    return f;
}

} // namespace qtb

#include "qtb/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <thread>

#include "qtb/errors.hpp"

namespace qtb {

namespace {

struct TrialCounters {
    long long failures = 0;
    long long defects = 0;
    long long corr_weight = 0;
    long long dec_failed = 0;
};

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    unsigned hc = std::thread::hardware_concurrency();
    return hc ? int(hc) : 1;
}

void run_trials(const CodeLayout& layout, DecoderKind kind, const NoiseConfig& cfg,
                uint64_t base_seed, int sweep_index, const GuideTable* guide,
                long long lo, long long hi, TrialCounters& out) {
    DecoderWorkspace ws;
    DecodeOptions opt;
    opt.bp_prior = bp_prior_for(cfg);
    opt.guide = guide;
    for (long long t = lo; t < hi; ++t) {
        SeedContext ctx{base_seed, layout.distance, sweep_index, t};
        ErrorState err;
        Syndrome syn;
        if (cfg.mode == Mode::pauli) {
            err = sample_pauli(layout, cfg, ctx);
            syn = extract_syndrome(layout, err);
        } else {
            GkpSample g = sample_gkp(layout, cfg, ctx);
            err = std::move(g.err);
            syn = extract_syndrome(layout, err);
            syn.s_z ^= g.meas_mask.s_z;
            syn.s_x ^= g.meas_mask.s_x;
        }
        DecodeResult dr = decode(kind, layout, syn, opt, ws);
        ErrorState res = residual(err, dr.correction);
        if (logical_failure(layout, res)) ++out.failures;
        out.defects += dr.defect_count;
        out.corr_weight += dr.correction_weight;
        if (dr.failed) ++out.dec_failed;
    }
}

// Trials sharded into contiguous index ranges; shard counters are summed in
// shard order, so the totals do not depend on the thread count.
TrialCounters run_point(const CodeLayout& layout, DecoderKind kind, const NoiseConfig& cfg,
                        uint64_t base_seed, int sweep_index, const GuideTable* guide,
                        long long n_trials, int threads) {
    threads = int(std::min<long long>(std::max(threads, 1), n_trials));
    if (threads <= 1) {
        TrialCounters c;
        run_trials(layout, kind, cfg, base_seed, sweep_index, guide, 0, n_trials, c);
        return c;
    }
    std::vector<TrialCounters> parts(threads);
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int i = 0; i < threads; ++i) {
        const long long lo = n_trials * i / threads;
        const long long hi = n_trials * (i + 1) / threads;
        pool.emplace_back(run_trials, std::cref(layout), kind, std::cref(cfg), base_seed,
                          sweep_index, guide, lo, hi, std::ref(parts[i]));
    }
    for (auto& th : pool) th.join();
    TrialCounters total;
    for (const auto& c : parts) {
        total.failures += c.failures;
        total.defects += c.defects;
        total.corr_weight += c.corr_weight;
        total.dec_failed += c.dec_failed;
    }
    return total;
}

void validate_common(const SweepSpec& spec) {
    if (spec.trials < 1) throw ConfigError("trials must be >= 1");
    if (spec.decoders.empty()) throw ConfigError("no decoders specified");
    if (spec.distances.empty()) throw ConfigError("no distances specified");
    for (int d : spec.distances)
        if (d < 3 || d % 2 == 0) throw ConfigError("distance must be odd and >= 3");
    if (spec.threads < 0) throw ConfigError("thread count must be >= 0");
}

std::map<int, CodeLayout> build_layouts(const std::vector<int>& distances) {
    std::map<int, CodeLayout> layouts;
    for (int d : distances)
        if (!layouts.count(d)) layouts.emplace(d, build_code(d));
    return layouts;
}

SweepPointRecord make_record(const SweepSpec& spec, DecoderKind kind, int distance,
                             const std::string& var, double x, const TrialCounters& c,
                             double wall_s) {
    SweepPointRecord rec;
    rec.mode = mode_name(spec.mode);
    rec.decoder = decoder_name(kind);
    rec.distance = distance;
    rec.sweep_var = var;
    rec.sweep_value = x;
    rec.trials = spec.trials;
    rec.failures = c.failures;
    PointEstimate pe = wilson_ci(c.failures, spec.trials);
    rec.ler = pe.ler;
    rec.ci_low = pe.ci_low;
    rec.ci_high = pe.ci_high;
    rec.mean_defects = double(c.defects) / double(spec.trials);
    rec.mean_correction_weight = double(c.corr_weight) / double(spec.trials);
    rec.decoder_failure_rate = double(c.dec_failed) / double(spec.trials);
    rec.runtime_s = wall_s;
    rec.base_seed = spec.base_seed;
    return rec;
}

// one discarded trial so one-time allocation stays out of the timings
void warm_up(const CodeLayout& layout, DecoderKind kind, const NoiseConfig& cfg,
             uint64_t base_seed, const GuideTable* guide) {
    TrialCounters scratch;
    run_trials(layout, kind, cfg, base_seed, 0, guide, 0, 1, scratch);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

} // namespace

std::vector<double> GridSpec::points() const {
    if (!std::isfinite(start) || !std::isfinite(stop) || !std::isfinite(step))
        throw ConfigError("grid bounds must be finite");
    if (!(step > 0)) throw ConfigError("grid step must be positive");
    const double ratio = (stop - start) / step;
    if (ratio < -1e-9) throw ConfigError("grid stop is below grid start");
    const long long n = std::max<long long>(1, (long long)std::floor(ratio + 1e-9) + 1);
    std::vector<double> xs(n);
    for (long long i = 0; i < n; ++i) xs[i] = start + double(i) * step;
    return xs;
}

std::string mode_name(Mode mode) { return mode == Mode::pauli ? "pauli" : "gkp"; }

std::string sweep_var_name(Mode mode) { return mode == Mode::pauli ? "p" : "sigma"; }

double bp_prior_for(const NoiseConfig& noise) {
    const double p = noise.mode == Mode::pauli ? noise.p : gkp_flip_probability(noise.sigma);
    return std::clamp(p, 1e-9, 0.499);
}

std::vector<PointEstimate> curve_estimates(const std::vector<SweepPointRecord>& records,
                                           const std::string& decoder, int distance) {
    std::vector<PointEstimate> out;
    for (const auto& r : records)
        if (r.decoder == decoder && r.distance == distance)
            out.push_back(wilson_ci(r.failures, r.trials));
    return out;
}

SweepResult run_sweep(const SweepSpec& spec) {
    validate_common(spec);
    const std::vector<double> xs = spec.grid.points();
    const int threads = resolve_threads(spec.threads);
    const std::string var = sweep_var_name(spec.mode);
    const auto layouts = build_layouts(spec.distances);

    SweepResult out;
    for (DecoderKind kind : spec.decoders) {
        if (kind == DecoderKind::guided_mwpm && spec.guide == nullptr) {
            out.skips.push_back({decoder_name(kind), "no guide table resolved; decoder skipped"});
            continue;
        }
        for (int d : spec.distances) {
            const CodeLayout& layout = layouts.at(d);
            NoiseConfig cfg = spec.noise;
            cfg.mode = spec.mode;
            if (spec.mode == Mode::pauli) cfg.p = xs[0];
            else cfg.sigma = xs[0];
            warm_up(layout, kind, cfg, spec.base_seed, spec.guide);
            for (size_t xi = 0; xi < xs.size(); ++xi) {
                if (spec.mode == Mode::pauli) cfg.p = xs[xi];
                else cfg.sigma = xs[xi];
                const auto t0 = std::chrono::steady_clock::now();
                TrialCounters c = run_point(layout, kind, cfg, spec.base_seed, int(xi),
                                            spec.guide, spec.trials, threads);
                out.records.push_back(
                    make_record(spec, kind, d, var, xs[xi], c, seconds_since(t0)));
            }
        }
    }
    return out;
}

FidelityReport run_fidelity_study(const SweepSpec& spec, int serial_threads,
                                  int parallel_threads) {
    if (serial_threads < 1) throw ConfigError("serial thread count must be >= 1");
    if (parallel_threads < 2) throw ConfigError("parallel thread count must be >= 2");

    SweepSpec serial = spec;
    serial.threads = serial_threads;
    SweepSpec parallel = spec;
    parallel.threads = parallel_threads;

    auto t0 = std::chrono::steady_clock::now();
    SweepResult rs = run_sweep(serial);
    const double t_serial = seconds_since(t0);
    t0 = std::chrono::steady_clock::now();
    SweepResult rp = run_sweep(parallel);
    const double t_parallel = seconds_since(t0);

    if (rs.records.size() != rp.records.size())
        throw std::runtime_error("fidelity study: record counts diverged");
    std::vector<double> ler_s, ler_p;
    long long total_trials = 0;
    for (size_t i = 0; i < rs.records.size(); ++i) {
        const auto& a = rs.records[i];
        const auto& b = rp.records[i];
        if (a.decoder != b.decoder || a.distance != b.distance ||
            a.sweep_value != b.sweep_value)
            throw std::runtime_error("fidelity study: grids diverged");
        ler_s.push_back(a.ler);
        ler_p.push_back(b.ler);
        total_trials += b.trials;
    }
    if (ler_s.empty()) throw EmptyDataError("fidelity study produced no records");

    FidelityDelta fd = fidelity_delta(ler_s, ler_p);
    FidelityReport rep;
    rep.t_serial = t_serial;
    rep.t_parallel = t_parallel;
    rep.speedup = t_serial / std::max(t_parallel, 1e-12);
    rep.throughput = double(total_trials) / std::max(t_parallel, 1e-12);
    rep.abs_delta = std::move(fd.abs_delta);
    rep.mean_abs = fd.mean_abs;
    rep.max_abs = fd.max_abs;
    rep.pearson = fd.pearson;
    rep.serial_threads = serial_threads;
    rep.parallel_threads = parallel_threads;
    rep.total_trials = total_trials;
    return rep;
}

AblationResult run_ablation(const SweepSpec& base, const std::string& component,
                            const std::vector<double>& levels) {
    validate_common(base);
    if (base.mode != Mode::gkp) throw ConfigError("ablation requires gkp mode");
    if (levels.size() < 2) throw ConfigError("ablation needs at least 2 levels");
    for (double e : levels)
        if (!(e >= 0.0 && e <= 1.0)) throw ConfigError("ablation levels must lie in [0,1]");
    if (*std::max_element(levels.begin(), levels.end()) ==
        *std::min_element(levels.begin(), levels.end()))
        throw ConfigError("ablation levels are all identical");

    double NoiseConfig::* field = nullptr;
    std::string var;
    if (component == "gate") { field = &NoiseConfig::p_gate; var = "p_gate"; }
    else if (component == "meas") { field = &NoiseConfig::p_meas; var = "p_meas"; }
    else if (component == "idle") { field = &NoiseConfig::p_idle; var = "p_idle"; }
    else if (component == "loss") { field = &NoiseConfig::p_loss; var = "p_loss"; }
    else throw ConfigError("unknown ablation component: " + component);
    if (component == "loss" && !base.noise.loss_map.empty())
        throw ConfigError("loss_map overrides p_loss; remove it for a loss ablation");

    const int threads = resolve_threads(base.threads);
    const auto layouts = build_layouts(base.distances);

    AblationResult out;
    for (DecoderKind kind : base.decoders) {
        if (kind == DecoderKind::guided_mwpm && base.guide == nullptr) {
            out.skips.push_back({decoder_name(kind), "no guide table resolved; decoder skipped"});
            continue;
        }
        for (int d : base.distances) {
            const CodeLayout& layout = layouts.at(d);
            NoiseConfig cfg = base.noise;
            cfg.mode = Mode::gkp;
            cfg.*field = levels[0];
            warm_up(layout, kind, cfg, base.base_seed, base.guide);
            std::vector<double> lers;
            for (size_t li = 0; li < levels.size(); ++li) {
                cfg.*field = levels[li];
                const auto t0 = std::chrono::steady_clock::now();
                TrialCounters c = run_point(layout, kind, cfg, base.base_seed, int(li),
                                            base.guide, base.trials, threads);
                out.records.push_back(
                    make_record(base, kind, d, var, levels[li], c, seconds_since(t0)));
                lers.push_back(out.records.back().ler);
            }
            out.slopes.push_back({decoder_name(kind), d, ablation_slope(levels, lers)});
        }
    }
    return out;
}

DenseWindowResult run_dense_window(const SweepSpec& spec) {
    SweepResult sw = run_sweep(spec);
    DenseWindowResult out;
    out.records = std::move(sw.records);
    out.skips = std::move(sw.skips);

    const std::vector<double> xs = spec.grid.points();
    for (DecoderKind kind : spec.decoders) {
        const std::string name = decoder_name(kind);
        for (size_t i = 0; i < spec.distances.size(); ++i) {
            for (size_t j = i + 1; j < spec.distances.size(); ++j) {
                const int da = spec.distances[i], db = spec.distances[j];
                std::vector<double> la, lb;
                for (const auto& r : out.records) {
                    if (r.decoder != name) continue;
                    if (r.distance == da) la.push_back(r.ler);
                    else if (r.distance == db) lb.push_back(r.ler);
                }
                if (la.empty() && lb.empty()) continue;  // decoder was skipped
                if (la.size() != xs.size() || lb.size() != xs.size())
                    throw std::runtime_error("dense window: curve lengths diverged");
                out.crossings.push_back({name, da, db, crossing(xs, la, lb)});
            }
        }
    }
    return out;
}

} // namespace qtb

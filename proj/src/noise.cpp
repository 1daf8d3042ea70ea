#include "qtb/noise.hpp"

#include <cmath>
#include <stdexcept>

#include "qtb/rng.hpp"

namespace qtb {

namespace {
constexpr double k_lambda = k_gkp_spacing;
constexpr double k_sqrt2 = 1.41421356237309504880;
} // namespace

NoiseConfig gkp_defaults(double sigma) {
    NoiseConfig cfg;
    cfg.mode = Mode::gkp;
    cfg.sigma = sigma;
    cfg.p_gate = 0.005;
    cfg.p_meas = 0.01;
    cfg.p_idle = 0.005;
    cfg.p_loss = 0.005;
    return cfg;
}

uint64_t mix_seed(const SeedContext& ctx) {
    uint64_t s = ctx.base_seed;
    s = rng::mix(s, (uint64_t)ctx.distance);
    s = rng::mix(s, (uint64_t)ctx.sweep_index);
    s = rng::mix(s, (uint64_t)ctx.trial_index);
    return s;
}

uint64_t lane_seed(const SeedContext& ctx, int lane) {
    return rng::mix(mix_seed(ctx), (uint64_t)lane);
}

ErrorState sample_pauli(const CodeLayout& layout, const NoiseConfig& cfg, const SeedContext& ctx) {
    if (cfg.p < 0.0 || cfg.p > 1.0)
        throw std::invalid_argument("sample_pauli: p outside [0, 1]");
    ErrorState e = make_error_state(layout);
    rng::Stream sx(lane_seed(ctx, lane_q));
    rng::Stream sz(lane_seed(ctx, lane_p));
    for (int q = 0; q < layout.n_data; ++q)
        if (sx.bernoulli(cfg.p)) e.e_x.set(q, true);
    for (int q = 0; q < layout.n_data; ++q)
        if (sz.bernoulli(cfg.p)) e.e_z.set(q, true);
    return e;
}

bool gkp_digitize(double delta) {
    long long n = std::llround(delta / k_lambda);
    return n % 2 != 0;
}

double gkp_flip_probability(double sigma) {
    if (sigma < 0.0) throw std::invalid_argument("gkp_flip_probability: sigma < 0");
    if (sigma == 0.0) return 0.0;
    // P(|round(delta/lambda)| odd) summed over both tails via erfc differences
    double total = 0.0;
    for (long long n = 1;; n += 2) {
        double a = (double(n) - 0.5) * k_lambda / (sigma * k_sqrt2);
        double b = (double(n) + 0.5) * k_lambda / (sigma * k_sqrt2);
        double term = std::erfc(a) - std::erfc(b);
        total += term;
        if (term < 1e-18 && n >= 3) break;
    }
    return total;
}

GkpSample sample_gkp(const CodeLayout& layout, const NoiseConfig& cfg, const SeedContext& ctx) {
    if (cfg.sigma < 0.0)
        throw std::invalid_argument("sample_gkp: sigma < 0");
    for (double r : {cfg.p_gate, cfg.p_meas, cfg.p_idle, cfg.p_loss})
        if (r < 0.0 || r > 1.0)
            throw std::invalid_argument("sample_gkp: channel rate outside [0, 1]");
    if (!cfg.loss_map.empty() && (int)cfg.loss_map.size() != layout.n_data)
        throw std::invalid_argument("sample_gkp: loss_map size mismatch");

    GkpSample out;
    out.err = make_error_state(layout);
    const int n = layout.n_data;

    // 1) quadrature displacements, digitized
    {
        rng::Stream sq(lane_seed(ctx, lane_q));
        for (int q = 0; q < n; ++q)
            if (gkp_digitize(rng::normal(sq, 0.0, cfg.sigma))) out.err.e_x.set(q, true);
        rng::Stream sp(lane_seed(ctx, lane_p));
        for (int q = 0; q < n; ++q)
            if (gkp_digitize(rng::normal(sp, 0.0, cfg.sigma))) out.err.e_z.set(q, true);
    }
    // 2) gate flips, X then Z per qubit
    {
        rng::Stream s(lane_seed(ctx, lane_gate));
        for (int q = 0; q < n; ++q) {
            if (s.bernoulli(cfg.p_gate)) out.err.e_x.flip(q);
            if (s.bernoulli(cfg.p_gate)) out.err.e_z.flip(q);
        }
    }
    // 3) idle flips
    {
        rng::Stream s(lane_seed(ctx, lane_idle));
        for (int q = 0; q < n; ++q) {
            if (s.bernoulli(cfg.p_idle)) out.err.e_x.flip(q);
            if (s.bernoulli(cfg.p_idle)) out.err.e_z.flip(q);
        }
    }
    // 4) loss: erase and replace with a uniformly random Pauli (two fair coins)
    {
        rng::Stream s(lane_seed(ctx, lane_loss));
        for (int q = 0; q < n; ++q) {
            double rate = cfg.loss_map.empty() ? cfg.p_loss : cfg.loss_map[q];
            if (rate < 0.0 || rate > 1.0)
                throw std::invalid_argument("sample_gkp: loss rate outside [0, 1]");
            if (s.bernoulli(rate)) {
                out.err.erased.set(q, true);
                out.err.e_x.set(q, s.bernoulli(0.5));
                out.err.e_z.set(q, s.bernoulli(0.5));
            }
        }
    }
    // 5) measurement mask over the syndrome bits, Z checks then X checks
    {
        rng::Stream s(lane_seed(ctx, lane_meas));
        out.meas_mask.s_z = BitVec(layout.h_z.rows);
        out.meas_mask.s_x = BitVec(layout.h_x.rows);
        for (int i = 0; i < layout.h_z.rows; ++i)
            if (s.bernoulli(cfg.p_meas)) out.meas_mask.s_z.set(i, true);
        for (int i = 0; i < layout.h_x.rows; ++i)
            if (s.bernoulli(cfg.p_meas)) out.meas_mask.s_x.set(i, true);
    }
    return out;
}

} // namespace qtb

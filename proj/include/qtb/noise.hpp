#pragma once

#include <cstdint>
#include <vector>

#include "qtb/code_lattice.hpp"

namespace qtb {

enum class Mode { pauli, gkp };

// grid spacing of the digitizer bins, sqrt(pi)
inline constexpr double k_gkp_spacing = 1.77245385090551602730;

struct NoiseConfig {
    Mode mode = Mode::pauli;
    double p = 0.0;       // pauli: independent X/Z flip probability
    double sigma = 0.0;   // gkp: displacement standard deviation per quadrature
    double p_gate = 0.005;
    double p_meas = 0.01;
    double p_idle = 0.005;
    double p_loss = 0.005;
    std::vector<double> loss_map;  // optional per-qubit loss rates, size n_data
};

// locked default channel stack for the gkp mode
NoiseConfig gkp_defaults(double sigma);

struct SeedContext {
    uint64_t base_seed = 0;
    int distance = 0;
    int sweep_index = 0;
    long long trial_index = 0;
};

// Substream lanes, mixed in as a fourth chained value after
// (distance, sweep_index, trial_index). Lane order is part of the contract:
// q-quadrature, p-quadrature, gate, idle, loss, measurement.
enum : int {
    lane_q = 0,
    lane_p = 1,
    lane_gate = 2,
    lane_idle = 3,
    lane_loss = 4,
    lane_meas = 5,
};

// Chain (distance, sweep_index, trial_index) into base_seed with
// s <- splitmix64(s XOR value*golden) per value.
uint64_t mix_seed(const SeedContext& ctx);
// One more chain link selects the channel substream.
uint64_t lane_seed(const SeedContext& ctx, int lane);

ErrorState sample_pauli(const CodeLayout& layout, const NoiseConfig& cfg, const SeedContext& ctx);

struct SyndromeMask {
    BitVec s_z, s_x;
};

struct GkpSample {
    ErrorState err;
    SyndromeMask meas_mask;  // to be XORed onto the extracted syndrome
};

// Channel order: displacement digitization, gate flips, idle flips, loss
// replacement, measurement mask. Within each lane, draws advance in qubit
// (or check) index order.
GkpSample sample_gkp(const CodeLayout& layout, const NoiseConfig& cfg, const SeedContext& ctx);

// round(delta / sqrt(pi)) with halfway ties away from zero; odd bins flip
bool gkp_digitize(double delta);

// analytic Gaussian mass over the odd digitization bins
double gkp_flip_probability(double sigma);

} // namespace qtb

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qtb/code_lattice.hpp"

namespace qtb {

// Per-edge weight multipliers for the guided matcher. Keys are "i-j" with
// i < j global check indices (Z checks first, then X checks offset by the
// Z-check count), or "i-B" for a check-to-boundary edge. Missing keys default
// to 1; values must be positive.
struct GuideTable {
    std::map<std::string, double> mult;

    double pair_factor(int gi, int gj) const;
    double boundary_factor(int gi) const;
};

GuideTable parse_guide_table(const std::string& json_text);
GuideTable load_guide_table(const std::string& path);

struct DecodeResult {
    ErrorState correction;
    bool failed = false;        // belief propagation only: syndrome unsatisfied at the iteration cap
    int defect_count = 0;       // lit syndrome bits consumed (both halves)
    int correction_weight = 0;  // qubits flipped by the correction
    int iterations_used = 0;    // belief propagation only
};

struct DecodeOptions {
    double bp_prior = 0.01;
    int bp_max_iters = 50;
    const GuideTable* guide = nullptr;
    const BitVec* erased = nullptr;  // accepted by the interface; the four baseline decoders ignore it
};

// Reusable per-thread scratch space. Not safe to share between concurrent
// decode calls.
class DecoderWorkspace {
public:
    struct Impl;
    DecoderWorkspace();
    ~DecoderWorkspace();
    DecoderWorkspace(const DecoderWorkspace&) = delete;
    DecoderWorkspace& operator=(const DecoderWorkspace&) = delete;
    Impl& impl() { return *impl_; }

private:
    Impl* impl_;
};

// One syndrome half matched on the defect graph: real defect pairs, defects
// routed to the boundary, and the total matched weight in quantized units
// (edge weight = lattice distance * guide multiplier * 2^20, rounded).
struct Matching {
    std::vector<std::pair<int, int>> pairs;  // defect indices into `defects`
    std::vector<int> to_boundary;
    std::vector<int> defects;  // lit check indices, ascending
    long long weight_units = 0;
};

inline constexpr long long k_weight_scale = 1ll << 20;

Matching match_defects(const CodeLayout& layout, CheckKind kind, const BitVec& lit,
                       const GuideTable* guide, DecoderWorkspace& ws);

DecodeResult decode_mwpm(const CodeLayout& layout, const Syndrome& syn, DecoderWorkspace& ws);
DecodeResult decode_uf(const CodeLayout& layout, const Syndrome& syn, DecoderWorkspace& ws);
DecodeResult decode_bp(const CodeLayout& layout, const Syndrome& syn, const DecodeOptions& opt,
                       DecoderWorkspace& ws);
DecodeResult decode_guided_mwpm(const CodeLayout& layout, const Syndrome& syn,
                                const GuideTable& guide, DecoderWorkspace& ws);

enum class DecoderKind { mwpm, uf, bp, guided_mwpm };

std::optional<DecoderKind> decoder_from_name(std::string_view name);
std::string decoder_name(DecoderKind kind);

DecodeResult decode(DecoderKind kind, const CodeLayout& layout, const Syndrome& syn,
                    const DecodeOptions& opt, DecoderWorkspace& ws);

// Belief propagation core on an arbitrary parity-check matrix; exposed so the
// marginals can be checked against exact posteriors on tiny codes.
struct BpOutcome {
    BitVec hard;               // hard-decision error estimate
    std::vector<double> llr;   // posterior log-likelihood ratios
    bool converged = false;
    int iterations = 0;
};

BpOutcome bp_solve(const BitMatrix& h, const BitVec& syndrome, double prior, int max_iters);

} // namespace qtb

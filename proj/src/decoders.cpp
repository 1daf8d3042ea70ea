#include "qtb/decoders.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <deque>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "blossom.hpp"

namespace qtb {

namespace {

// guide multipliers are folded into integer edge weights, so their range is
// capped to keep the quantization faithful
constexpr double k_mult_lo = 1e-6;
constexpr double k_mult_hi = 1e6;
constexpr double k_llr_cap = 30.0;

long long quantize_weight(double dist, double mult) {
    return std::llround(dist * mult * double(k_weight_scale));
}

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

bool valid_guide_key(const std::string& key) {
    auto dash = key.find('-');
    if (dash == std::string::npos || dash == 0 || dash + 1 >= key.size()) return false;
    std::string_view lhs = std::string_view(key).substr(0, dash);
    std::string_view rhs = std::string_view(key).substr(dash + 1);
    if (!all_digits(lhs)) return false;
    if (rhs == "B") return true;
    if (!all_digits(rhs)) return false;
    return std::stol(std::string(lhs)) < std::stol(std::string(rhs));
}

struct UfScratch {
    std::vector<int> parent;
    std::vector<uint8_t> parity, boundary;
    std::vector<int> support;
    std::vector<int> edge_a, edge_b, pend;
    std::vector<int> solid_order;
    std::vector<int> deg;
    std::vector<uint8_t> lit2;
    std::vector<uint8_t> alive;
    std::vector<std::array<int, 3>> forest;  // vertex a, vertex b, qubit
    std::vector<std::vector<std::pair<int, int>>> adj;  // (other vertex, forest edge id)
};

} // namespace

struct DecoderWorkspace::Impl {
    detail::BlossomMatcher bm;
    std::vector<std::vector<long long>> wbuf;
    UfScratch uf;
};

DecoderWorkspace::DecoderWorkspace() : impl_(new Impl) {}
DecoderWorkspace::~DecoderWorkspace() { delete impl_; }

double GuideTable::pair_factor(int gi, int gj) const {
    if (gi > gj) std::swap(gi, gj);
    auto it = mult.find(std::to_string(gi) + "-" + std::to_string(gj));
    return it == mult.end() ? 1.0 : it->second;
}

double GuideTable::boundary_factor(int gi) const {
    auto it = mult.find(std::to_string(gi) + "-B");
    return it == mult.end() ? 1.0 : it->second;
}

GuideTable parse_guide_table(const std::string& json_text) {
    nlohmann::json j = nlohmann::json::parse(json_text);
    if (!j.is_object())
        throw std::invalid_argument("guide table: top level must be a JSON object");
    GuideTable t;
    for (auto& [key, val] : j.items()) {
        if (!valid_guide_key(key))
            throw std::invalid_argument("guide table: bad edge key \"" + key + "\"");
        if (!val.is_number())
            throw std::invalid_argument("guide table: multiplier for \"" + key +
                                        "\" is not a number");
        double x = val.get<double>();
        if (!std::isfinite(x) || x < k_mult_lo || x > k_mult_hi)
            throw std::invalid_argument("guide table: multiplier for \"" + key +
                                        "\" outside [1e-6, 1e6]");
        t.mult.emplace(key, x);
    }
    return t;
}

GuideTable load_guide_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open guide table: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_guide_table(buf.str());
}

Matching match_defects(const CodeLayout& layout, CheckKind kind, const BitVec& lit,
                       const GuideTable* guide, DecoderWorkspace& ws) {
    const auto& coords = kind == CheckKind::z ? layout.z_coords : layout.x_coords;
    const int m = int(coords.size());
    if (int(lit.size()) != m)
        throw std::invalid_argument("match_defects: syndrome size mismatch");
    const int g_off = kind == CheckKind::z ? 0 : layout.h_z.rows;

    Matching out;
    for (int i = 0; i < m; ++i)
        if (lit.get(i)) out.defects.push_back(i);
    const int k = int(out.defects.size());
    if (k == 0) return out;

    // nodes 0..k-1 are defects, k..2k-1 their boundary twins; a defect may
    // pair with another defect or with its own twin, twins pair freely at
    // zero cost
    const int nn = 2 * k;
    auto& w = ws.impl().wbuf;
    w.assign(nn, std::vector<long long>(nn, -1));
    for (int i = 0; i < k; ++i) {
        const int di = out.defects[i];
        for (int j = i + 1; j < k; ++j) {
            const int dj = out.defects[j];
            const double mu = guide ? guide->pair_factor(g_off + di, g_off + dj) : 1.0;
            w[i][j] = w[j][i] = quantize_weight(face_distance(coords[di], coords[dj]), mu);
        }
        const double mu = guide ? guide->boundary_factor(g_off + di) : 1.0;
        w[i][k + i] = w[k + i][i] = quantize_weight(boundary_distance(layout, kind, di), mu);
        for (int j = i + 1; j < k; ++j) w[k + i][k + j] = w[k + j][k + i] = 0;
    }

    auto r = detail::min_weight_perfect_matching(nn, w, ws.impl().bm);
    if (!r.perfect) throw std::runtime_error("match_defects: no perfect matching");
    for (int u = 1; u <= k; ++u) {
        const int mate = r.mate[u];
        if (mate <= k) {
            if (mate > u) out.pairs.emplace_back(u - 1, mate - 1);
        } else if (mate == k + u) {
            out.to_boundary.push_back(u - 1);
        } else {
            throw std::runtime_error("match_defects: defect paired with a foreign twin");
        }
    }
    out.weight_units = r.total;
    return out;
}

namespace {

DecodeResult decode_matching(const CodeLayout& layout, const Syndrome& syn,
                             const GuideTable* guide, DecoderWorkspace& ws) {
    DecodeResult res;
    res.correction = make_error_state(layout);
    res.defect_count = syn.s_z.popcount() + syn.s_x.popcount();

    const struct {
        CheckKind kind;
        const BitVec* lit;
        BitVec* corr;
    } halves[2] = {
        {CheckKind::z, &syn.s_z, &res.correction.e_x},
        {CheckKind::x, &syn.s_x, &res.correction.e_z},
    };
    for (const auto& h : halves) {
        Matching mt = match_defects(layout, h.kind, *h.lit, guide, ws);
        for (auto [a, b] : mt.pairs)
            for (int q : path_between(layout, h.kind, mt.defects[a], mt.defects[b]))
                h.corr->flip(q);
        for (int a : mt.to_boundary)
            for (int q : path_to_boundary(layout, h.kind, mt.defects[a]))
                h.corr->flip(q);
    }
    res.correction_weight = res.correction.e_x.popcount() + res.correction.e_z.popcount();
    return res;
}

int uf_find(std::vector<int>& parent, int v) {
    while (parent[v] != v) {
        parent[v] = parent[parent[v]];
        v = parent[v];
    }
    return v;
}

// Cluster growth and peeling on one check graph. Clusters around lit checks
// grow half an edge per round until every cluster has even parity or touches
// the boundary; a spanning forest in growth order is then peeled leaf-first,
// flipping a qubit whenever the peeled leaf still carries a defect.
void uf_half(const CodeLayout& layout, CheckKind kind, const BitVec& lit, BitVec& corr,
             UfScratch& s) {
    const auto& checks_of =
        kind == CheckKind::z ? layout.z_checks_of_qubit : layout.x_checks_of_qubit;
    const int m = kind == CheckKind::z ? layout.h_z.rows : layout.h_x.rows;
    const int vb = m;  // virtual boundary vertex
    const int nv = m + 1;
    const int ne = layout.n_data;

    s.edge_a.resize(ne);
    s.edge_b.resize(ne);
    for (int q = 0; q < ne; ++q) {
        s.edge_a[q] = checks_of[q][0];
        s.edge_b[q] = checks_of[q][1] < 0 ? vb : checks_of[q][1];
    }
    s.parent.resize(nv);
    for (int v = 0; v < nv; ++v) s.parent[v] = v;
    s.parity.assign(nv, 0);
    for (int c = 0; c < m; ++c) s.parity[c] = lit.get(c) ? 1 : 0;
    s.boundary.assign(nv, 0);
    s.boundary[vb] = 1;
    s.support.assign(ne, 0);
    s.pend.assign(ne, 0);
    s.solid_order.clear();

    auto invalid = [&](int root) { return s.parity[root] == 1 && s.boundary[root] == 0; };
    auto merge = [&](int a, int b) {
        int ra = uf_find(s.parent, a), rb = uf_find(s.parent, b);
        if (ra == rb) return;
        s.parent[rb] = ra;
        s.parity[ra] ^= s.parity[rb];
        s.boundary[ra] |= s.boundary[rb];
    };

    bool any_invalid = false;
    for (int v = 0; v < nv; ++v)
        if (invalid(v)) any_invalid = true;

    int rounds = 0;
    while (any_invalid) {
        if (++rounds > 2 * ne + 4)
            throw std::runtime_error("uf: growth failed to terminate");
        // increments against the round-start clusters, applied afterwards so
        // merges inside a round cannot feed further growth
        for (int q = 0; q < ne; ++q) {
            s.pend[q] = 0;
            if (s.support[q] >= 2) continue;
            const int ra = uf_find(s.parent, s.edge_a[q]);
            const int rb = uf_find(s.parent, s.edge_b[q]);
            if (invalid(ra)) ++s.pend[q];
            if (rb != ra && invalid(rb)) ++s.pend[q];
        }
        for (int q = 0; q < ne; ++q) {
            if (s.pend[q] == 0) continue;
            s.support[q] += s.pend[q];
            if (s.support[q] >= 2) {
                s.support[q] = 2;
                s.solid_order.push_back(q);
                merge(s.edge_a[q], s.edge_b[q]);
            }
        }
        any_invalid = false;
        for (int v = 0; v < nv; ++v)
            if (s.parent[v] == v && invalid(v)) any_invalid = true;
    }

    // spanning forest in growth order
    for (int v = 0; v < nv; ++v) s.parent[v] = v;
    s.adj.assign(nv, {});
    s.deg.assign(nv, 0);
    s.forest.clear();
    s.alive.clear();
    for (int q : s.solid_order) {
        const int a = s.edge_a[q], b = s.edge_b[q];
        if (uf_find(s.parent, a) == uf_find(s.parent, b)) continue;
        merge(a, b);
        const int eid = int(s.forest.size());
        s.forest.push_back({a, b, q});
        s.alive.push_back(1);
        s.adj[a].emplace_back(b, eid);
        s.adj[b].emplace_back(a, eid);
        ++s.deg[a];
        ++s.deg[b];
    }

    s.lit2.assign(nv, 0);
    for (int c = 0; c < m; ++c) s.lit2[c] = lit.get(c) ? 1 : 0;
    std::deque<int> leaves;
    for (int v = 0; v < m; ++v)
        if (s.deg[v] == 1) leaves.push_back(v);
    while (!leaves.empty()) {
        const int v = leaves.front();
        leaves.pop_front();
        if (s.deg[v] != 1) continue;
        int u = -1, eid = -1;
        for (auto [o, e] : s.adj[v])
            if (s.alive[e]) {
                u = o;
                eid = e;
                break;
            }
        s.alive[eid] = 0;
        --s.deg[v];
        --s.deg[u];
        if (s.lit2[v]) {
            corr.flip(s.forest[eid][2]);
            s.lit2[v] = 0;
            if (u != vb) s.lit2[u] ^= 1;
        }
        if (u != vb && s.deg[u] == 1) leaves.push_back(u);
    }
    for (int c = 0; c < m; ++c)
        if (s.lit2[c]) throw std::runtime_error("uf: peeling left a defect unmatched");
}

} // namespace

DecodeResult decode_mwpm(const CodeLayout& layout, const Syndrome& syn, DecoderWorkspace& ws) {
    return decode_matching(layout, syn, nullptr, ws);
}

DecodeResult decode_guided_mwpm(const CodeLayout& layout, const Syndrome& syn,
                                const GuideTable& guide, DecoderWorkspace& ws) {
    return decode_matching(layout, syn, &guide, ws);
}

DecodeResult decode_uf(const CodeLayout& layout, const Syndrome& syn, DecoderWorkspace& ws) {
    DecodeResult res;
    res.correction = make_error_state(layout);
    res.defect_count = syn.s_z.popcount() + syn.s_x.popcount();
    uf_half(layout, CheckKind::z, syn.s_z, res.correction.e_x, ws.impl().uf);
    uf_half(layout, CheckKind::x, syn.s_x, res.correction.e_z, ws.impl().uf);
    res.correction_weight = res.correction.e_x.popcount() + res.correction.e_z.popcount();
    return res;
}

BpOutcome bp_solve(const BitMatrix& h, const BitVec& syndrome, double prior, int max_iters) {
    if (!(prior > 0.0 && prior < 1.0))
        throw std::invalid_argument("bp_solve: prior must lie in (0, 1)");
    if (int(syndrome.size()) != h.rows)
        throw std::invalid_argument("bp_solve: syndrome size mismatch");
    if (max_iters < 0) throw std::invalid_argument("bp_solve: negative iteration cap");

    const int m = h.rows, n = h.cols;
    std::vector<std::vector<int>> check_vars(m);
    std::vector<std::vector<std::pair<int, int>>> var_checks(n);  // (check, slot)
    for (int c = 0; c < m; ++c)
        for (int v = 0; v < n; ++v)
            if (h.row[c].get(v)) {
                var_checks[v].emplace_back(c, int(check_vars[c].size()));
                check_vars[c].push_back(v);
            }

    const double llr0 = std::log((1.0 - prior) / prior);
    std::vector<std::vector<double>> msg_vc(m), msg_cv(m);
    for (int c = 0; c < m; ++c) {
        msg_vc[c].assign(check_vars[c].size(), llr0);
        msg_cv[c].assign(check_vars[c].size(), 0.0);
    }

    BpOutcome out;
    out.hard = BitVec(n);
    out.llr.assign(n, llr0);

    auto satisfied = [&] { return h.mul(out.hard) == syndrome; };
    if (satisfied()) {
        out.converged = true;
        out.iterations = 0;
        return out;
    }

    const double tanh_cap = 1.0 - 1e-12;
    for (int it = 1; it <= max_iters; ++it) {
        for (int c = 0; c < m; ++c) {
            const double sign = syndrome.get(c) ? -1.0 : 1.0;
            const int deg = int(check_vars[c].size());
            for (int k = 0; k < deg; ++k) {
                double prod = sign;
                for (int k2 = 0; k2 < deg; ++k2)
                    if (k2 != k) prod *= std::tanh(msg_vc[c][k2] * 0.5);
                prod = std::clamp(prod, -tanh_cap, tanh_cap);
                msg_cv[c][k] = std::clamp(2.0 * std::atanh(prod), -k_llr_cap, k_llr_cap);
            }
        }
        for (int v = 0; v < n; ++v) {
            double total = llr0;
            for (auto [c, k] : var_checks[v]) total += msg_cv[c][k];
            out.llr[v] = total;
            out.hard.set(v, total < 0.0);
            for (auto [c, k] : var_checks[v])
                msg_vc[c][k] = std::clamp(total - msg_cv[c][k], -k_llr_cap, k_llr_cap);
        }
        out.iterations = it;
        if (satisfied()) {
            out.converged = true;
            return out;
        }
    }
    out.converged = false;
    out.iterations = max_iters;
    return out;
}

namespace {

// Greedy repair for a stalled message-passing solve: flip the least-confident
// member of each unsatisfied check, lowest index on ties, for at most rows
// passes. Leaves hard syndrome-consistent whenever the budget suffices.
bool bp_repair(const BitMatrix& h, const BitVec& syndrome, BitVec& hard,
               const std::vector<double>& llr) {
    BitVec unsat = h.mul(hard) ^ syndrome;
    for (int pass = 0; pass < h.rows && unsat.popcount(); ++pass) {
        for (int i = 0; i < h.rows; ++i) {
            if (!unsat.get(i)) continue;
            int best = -1;
            for (int q = 0; q < h.cols; ++q)
                if (h.row[i].get(q) && (best < 0 || std::fabs(llr[q]) < std::fabs(llr[best])))
                    best = q;
            if (best < 0) continue;
            hard.set(best, !hard.get(best));
            for (int j = 0; j < h.rows; ++j)
                if (h.row[j].get(best)) unsat.set(j, !unsat.get(j));
        }
    }
    return unsat.popcount() == 0;
}

} // namespace

DecodeResult decode_bp(const CodeLayout& layout, const Syndrome& syn, const DecodeOptions& opt,
                       DecoderWorkspace& ws) {
    (void)ws;
    DecodeResult res;
    res.correction = make_error_state(layout);
    res.defect_count = syn.s_z.popcount() + syn.s_x.popcount();
    BpOutcome oz = bp_solve(layout.h_z, syn.s_z, opt.bp_prior, opt.bp_max_iters);
    BpOutcome ox = bp_solve(layout.h_x, syn.s_x, opt.bp_prior, opt.bp_max_iters);
    res.correction.e_x = oz.hard;
    res.correction.e_z = ox.hard;
    bool ok_z = oz.converged || bp_repair(layout.h_z, syn.s_z, res.correction.e_x, oz.llr);
    bool ok_x = ox.converged || bp_repair(layout.h_x, syn.s_x, res.correction.e_z, ox.llr);
    res.failed = !(ok_z && ok_x);
    res.iterations_used = std::max(oz.iterations, ox.iterations);
    res.correction_weight = res.correction.e_x.popcount() + res.correction.e_z.popcount();
    return res;
}

std::optional<DecoderKind> decoder_from_name(std::string_view name) {
    if (name == "mwpm") return DecoderKind::mwpm;
    if (name == "uf") return DecoderKind::uf;
    if (name == "bp") return DecoderKind::bp;
    if (name == "guided-mwpm") return DecoderKind::guided_mwpm;
    return std::nullopt;
}

std::string decoder_name(DecoderKind kind) {
    switch (kind) {
        case DecoderKind::mwpm: return "mwpm";
        case DecoderKind::uf: return "uf";
        case DecoderKind::bp: return "bp";
        case DecoderKind::guided_mwpm: return "guided-mwpm";
    }
    throw std::logic_error("decoder_name: bad kind");
}

DecodeResult decode(DecoderKind kind, const CodeLayout& layout, const Syndrome& syn,
                    const DecodeOptions& opt, DecoderWorkspace& ws) {
    switch (kind) {
        case DecoderKind::mwpm: return decode_mwpm(layout, syn, ws);
        case DecoderKind::uf: return decode_uf(layout, syn, ws);
        case DecoderKind::bp: return decode_bp(layout, syn, opt, ws);
        case DecoderKind::guided_mwpm:
            if (!opt.guide)
                throw std::invalid_argument("guided-mwpm decoder requires a guide table");
            return decode_guided_mwpm(layout, syn, *opt.guide, ws);
    }
    throw std::logic_error("decode: bad kind");
}

} // namespace qtb

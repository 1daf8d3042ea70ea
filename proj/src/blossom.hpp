#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <stdexcept>
#include <vector>

namespace qtb::detail {

// Maximum-weight matching on a dense general graph: primal-dual blossom
// algorithm, O(V^3). Vertices are 1-based; edges with weight 0 are treated as
// absent. lab[] holds doubled dual variables so every adjustment stays
// integral; e_delta is twice the true slack of an edge.
//
// Used by the matching decoders through min_weight_perfect_matching below,
// which flips weights so the maximum-weight solution realizes the minimum
// total distance.
class BlossomMatcher {
public:
    void init(int n_vertices) {
        n = n_vertices;
        n_x = n;
        const int N = 2 * n + 1;
        g.assign(N, std::vector<Edge>(N));
        for (int u = 0; u < N; ++u)
            for (int v = 0; v < N; ++v) g[u][v] = {u, v, 0};
        lab.assign(N, 0);
        match_.assign(N, 0);
        slack_.assign(N, 0);
        st.assign(N, 0);
        pa.assign(N, 0);
        S.assign(N, -1);
        vis.assign(N, 0);
        flower.assign(N, {});
        flower_from.assign(N, std::vector<int>(n + 1, 0));
        t_ = 0;
    }

    void add_edge(int u, int v, long long w) {
        if (u < 1 || u > n || v < 1 || v > n || u == v)
            throw std::invalid_argument("BlossomMatcher: bad edge");
        g[u][v].w = g[v][u].w = w;
    }

    // returns total matched weight; match_of(u) is 0 for exposed vertices
    long long solve() {
        std::fill(match_.begin(), match_.end(), 0);
        n_x = n;
        long long w_max = 0;
        for (int u = 0; u <= n; ++u) { st[u] = u; flower[u].clear(); }
        for (int u = 1; u <= n; ++u)
            for (int v = 1; v <= n; ++v) {
                flower_from[u][v] = (u == v ? u : 0);
                w_max = std::max(w_max, g[u][v].w);
            }
        for (int u = 1; u <= n; ++u) lab[u] = w_max;
        while (matching()) {}
        long long tot = 0;
        for (int u = 1; u <= n; ++u)
            if (match_[u] && match_[u] < u) tot += g[u][match_[u]].w;
        return tot;
    }

    int match_of(int u) const { return match_[u]; }

private:
    struct Edge {
        int u = 0, v = 0;
        long long w = 0;
    };

    static constexpr long long k_inf = (1ll << 62);

    int n = 0, n_x = 0, t_ = 0;
    std::vector<std::vector<Edge>> g;
    std::vector<long long> lab;
    std::vector<int> match_, slack_, st, pa, S, vis;
    std::vector<std::vector<int>> flower;
    std::vector<std::vector<int>> flower_from;
    std::deque<int> q;

    long long e_delta(const Edge& e) const { return lab[e.u] + lab[e.v] - g[e.u][e.v].w * 2; }

    void update_slack(int u, int x) {
        if (!slack_[x] || e_delta(g[u][x]) < e_delta(g[slack_[x]][x])) slack_[x] = u;
    }

    void set_slack(int x) {
        slack_[x] = 0;
        for (int u = 1; u <= n; ++u)
            if (g[u][x].w > 0 && st[u] != x && S[st[u]] == 0) update_slack(u, x);
    }

    void q_push(int x) {
        if (x <= n) { q.push_back(x); return; }
        for (int i : flower[x]) q_push(i);
    }

    void set_st(int x, int b) {
        st[x] = b;
        if (x > n)
            for (int i : flower[x]) set_st(i, b);
    }

    // position of sub-blossom xr inside b, normalized to an even index so the
    // alternating cycle structure lines up
    int get_pr(int b, int xr) {
        int pr = int(std::find(flower[b].begin(), flower[b].end(), xr) - flower[b].begin());
        if (pr % 2 == 1) {
            std::reverse(flower[b].begin() + 1, flower[b].end());
            return int(flower[b].size()) - pr;
        }
        return pr;
    }

    void set_match(int u, int v) {
        match_[u] = g[u][v].v;
        if (u <= n) return;
        Edge e = g[u][v];
        int xr = flower_from[u][e.u];
        int pr = get_pr(u, xr);
        for (int i = 0; i < pr; ++i) set_match(flower[u][i], flower[u][i ^ 1]);
        set_match(xr, v);
        std::rotate(flower[u].begin(), flower[u].begin() + pr, flower[u].end());
    }

    void augment(int u, int v) {
        for (;;) {
            int xnv = st[match_[u]];
            set_match(u, v);
            if (!xnv) return;
            set_match(xnv, st[pa[xnv]]);
            u = st[pa[xnv]];
            v = xnv;
        }
    }

    int get_lca(int u, int v) {
        for (++t_; u || v; std::swap(u, v)) {
            if (u == 0) continue;
            if (vis[u] == t_) return u;
            vis[u] = t_;
            u = st[match_[u]];
            if (u) u = st[pa[u]];
        }
        return 0;
    }

    void add_blossom(int u, int lca, int v) {
        int b = n + 1;
        while (b <= n_x && st[b]) ++b;
        if (b > n_x) ++n_x;
        lab[b] = 0;
        S[b] = 0;
        match_[b] = match_[lca];
        flower[b].clear();
        flower[b].push_back(lca);
        for (int x = u, y; x != lca; x = st[pa[y]]) {
            flower[b].push_back(x);
            flower[b].push_back(y = st[match_[x]]);
            q_push(y);
        }
        std::reverse(flower[b].begin() + 1, flower[b].end());
        for (int x = v, y; x != lca; x = st[pa[y]]) {
            flower[b].push_back(x);
            flower[b].push_back(y = st[match_[x]]);
            q_push(y);
        }
        set_st(b, b);
        for (int x = 1; x <= n_x; ++x) g[b][x].w = g[x][b].w = 0;
        for (int x = 1; x <= n; ++x) flower_from[b][x] = 0;
        for (int xs : flower[b]) {
            for (int x = 1; x <= n_x; ++x)
                if (g[b][x].w == 0 || e_delta(g[xs][x]) < e_delta(g[b][x])) {
                    g[b][x] = g[xs][x];
                    g[x][b] = g[x][xs];
                }
            for (int x = 1; x <= n; ++x)
                if (flower_from[xs][x]) flower_from[b][x] = xs;
        }
        set_slack(b);
    }

    void expand_blossom(int b) {
        for (int i : flower[b]) set_st(i, i);
        int xr = flower_from[b][g[b][pa[b]].u];
        int pr = get_pr(b, xr);
        for (int i = 0; i < pr; i += 2) {
            int xs = flower[b][i], xns = flower[b][i + 1];
            pa[xs] = g[xns][xs].u;
            S[xs] = 1;
            S[xns] = 0;
            slack_[xs] = 0;
            set_slack(xns);
            q_push(xns);
        }
        S[xr] = 1;
        pa[xr] = pa[b];
        for (int i = pr + 1; i < (int)flower[b].size(); ++i) {
            int xs = flower[b][i];
            S[xs] = -1;
            set_slack(xs);
        }
        st[b] = 0;
    }

    bool on_found_edge(const Edge& e) {
        int u = st[e.u], v = st[e.v];
        if (S[v] == -1) {
            pa[v] = e.u;
            S[v] = 1;
            int nu = st[match_[v]];
            slack_[v] = slack_[nu] = 0;
            S[nu] = 0;
            q_push(nu);
        } else if (S[v] == 0) {
            int lca = get_lca(u, v);
            if (!lca) {
                augment(u, v);
                augment(v, u);
                return true;
            }
            add_blossom(u, lca, v);
        }
        return false;
    }

    bool matching() {
        std::fill(S.begin() + 1, S.begin() + n_x + 1, -1);
        std::fill(slack_.begin() + 1, slack_.begin() + n_x + 1, 0);
        q.clear();
        for (int x = 1; x <= n_x; ++x)
            if (st[x] == x && !match_[x]) {
                pa[x] = 0;
                S[x] = 0;
                q_push(x);
            }
        if (q.empty()) return false;
        for (;;) {
            while (!q.empty()) {
                int u = q.front();
                q.pop_front();
                if (S[st[u]] == 1) continue;
                for (int v = 1; v <= n; ++v)
                    if (g[u][v].w > 0 && st[u] != st[v]) {
                        if (e_delta(g[u][v]) == 0) {
                            if (on_found_edge(g[u][v])) return true;
                        } else {
                            update_slack(u, st[v]);
                        }
                    }
            }
            long long d = k_inf;
            for (int b = n + 1; b <= n_x; ++b)
                if (st[b] == b && S[b] == 1) d = std::min(d, lab[b] / 2);
            for (int x = 1; x <= n_x; ++x)
                if (st[x] == x && slack_[x]) {
                    if (S[x] == -1) d = std::min(d, e_delta(g[slack_[x]][x]));
                    else if (S[x] == 0) d = std::min(d, e_delta(g[slack_[x]][x]) / 2);
                }
            for (int u = 1; u <= n; ++u) {
                if (S[st[u]] == 0) {
                    if (lab[u] <= d) return false;  // exposed vertex priced out: no augmenting path
                    lab[u] -= d;
                } else if (S[st[u]] == 1) {
                    lab[u] += d;
                }
            }
            for (int b = n + 1; b <= n_x; ++b)
                if (st[b] == b) {
                    if (S[b] == 0) lab[b] += d * 2;
                    else if (S[b] == 1) lab[b] -= d * 2;
                }
            q.clear();
            for (int x = 1; x <= n_x; ++x)
                if (st[x] == x && slack_[x] && st[slack_[x]] != x &&
                    e_delta(g[slack_[x]][x]) == 0)
                    if (on_found_edge(g[slack_[x]][x])) return true;
            for (int b = n + 1; b <= n_x; ++b)
                if (st[b] == b && S[b] == 1 && lab[b] == 0) expand_blossom(b);
        }
    }
};

// Minimum-weight perfect matching on an even-order graph given nonnegative
// edge weights; absent pairs are marked with weight < 0. Returns mate[] (0
// when the instance admits no perfect matching, which callers treat as a
// logic error) and the summed original weight.
struct MinMatchResult {
    std::vector<int> mate;  // 1-based, mate[u] = v
    long long total = 0;
    bool perfect = false;
};

inline MinMatchResult min_weight_perfect_matching(int n_vertices,
                                                  const std::vector<std::vector<long long>>& w,
                                                  BlossomMatcher& bm) {
    MinMatchResult r;
    r.mate.assign(n_vertices + 1, 0);
    if (n_vertices == 0) {
        r.perfect = true;
        return r;
    }
    if (n_vertices % 2 != 0)
        throw std::invalid_argument("min_weight_perfect_matching: odd vertex count");
    long long w_max = 0;
    for (int u = 0; u < n_vertices; ++u)
        for (int v = 0; v < n_vertices; ++v)
            if (w[u][v] >= 0) w_max = std::max(w_max, w[u][v]);
    const long long big = w_max + 1;
    bm.init(n_vertices);
    for (int u = 0; u < n_vertices; ++u)
        for (int v = u + 1; v < n_vertices; ++v)
            if (w[u][v] >= 0) bm.add_edge(u + 1, v + 1, big - w[u][v]);
    bm.solve();
    r.perfect = true;
    r.total = 0;
    for (int u = 1; u <= n_vertices; ++u) {
        r.mate[u] = bm.match_of(u);
        if (!r.mate[u]) r.perfect = false;
        else if (r.mate[u] > u) r.total += w[u - 1][r.mate[u] - 1];
    }
    return r;
}

} // namespace qtb::detail

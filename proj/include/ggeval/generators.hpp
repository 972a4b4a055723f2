#pragma once

#include <cmath>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ggeval/graph.hpp"
#include "ggeval/rng.hpp"

namespace ggeval {

namespace detail {

inline int draw_size(int n_min, int n_max, Rng& rng) { return rng.uniform_int(n_min, n_max); }

// One Barabasi-Albert graph by the repeated-node urn. The k seed nodes start
// with no edges; while the urn is empty targets are drawn uniformly, so the
// first arrival links to every seed node. Each later arrival attaches k edges
// to distinct nodes with probability proportional to degree.
inline Graph ba_graph(int n, int k, Rng& rng) {
    std::vector<std::pair<int, int>> edges;
    edges.reserve(static_cast<std::size_t>(k) * static_cast<std::size_t>(n - k));
    std::vector<int> urn; // node id repeated once per unit of degree
    for (int node = k; node < n; ++node) {
        std::set<int> targets;
        while (static_cast<int>(targets.size()) < k) {
            int t;
            if (urn.empty())
                t = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(node)));
            else
                t = urn[rng.uniform_below(urn.size())];
            targets.insert(t);
        }
        for (int t : targets) {
            edges.emplace_back(t, node);
            urn.push_back(t);
            urn.push_back(node);
        }
    }
    return make_graph(n, std::move(edges));
}

} // namespace detail

/// Barabasi-Albert preferential attachment graphs, n uniform in [n_min, n_max].
inline GraphSet generate_ba(int count, int n_min, int n_max, int k, Rng& rng) {
    if (count <= 0) throw ValidationError("generate_ba: count must be positive");
    if (k < 2 || k >= n_min || n_min > n_max)
        throw ValidationError("generate_ba: need 2 <= k < n_min <= n_max");
    GraphSet gs;
    gs.provenance = {"ba",
                     {{"count", double(count)}, {"n_min", double(n_min)}, {"n_max", double(n_max)}, {"k", double(k)}},
                     rng.seed()};
    gs.graphs.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const int n = detail::draw_size(n_min, n_max, rng);
        gs.graphs.push_back(detail::ba_graph(n, k, rng));
    }
    return gs;
}

/// Watts-Strogatz small-world graphs: ring lattice with k nearest neighbours,
/// each lattice edge rewired with probability p_rewire. The kept endpoint is
/// the lattice source node; the new endpoint is a uniform non-neighbour.
inline GraphSet generate_ws(int count, int n_min, int n_max, int k, double p_rewire, Rng& rng) {
    if (count <= 0) throw ValidationError("generate_ws: count must be positive");
    if (k <= 0 || k % 2 != 0) throw ValidationError("generate_ws: k must be positive and even");
    if (k >= n_min || n_min > n_max) throw ValidationError("generate_ws: need k < n_min <= n_max");
    if (p_rewire < 0.0 || p_rewire > 1.0) throw ValidationError("generate_ws: p_rewire outside [0,1]");
    GraphSet gs;
    gs.provenance = {"ws",
                     {{"count", double(count)},
                      {"n_min", double(n_min)},
                      {"n_max", double(n_max)},
                      {"k", double(k)},
                      {"p_rewire", p_rewire}},
                     rng.seed()};
    gs.graphs.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const int n = detail::draw_size(n_min, n_max, rng);
        std::vector<std::set<int>> adj(static_cast<std::size_t>(n));
        auto add = [&](int a, int b) {
            adj[a].insert(b);
            adj[b].insert(a);
        };
        auto remove = [&](int a, int b) {
            adj[a].erase(b);
            adj[b].erase(a);
        };
        for (int j = 1; j <= k / 2; ++j)
            for (int u = 0; u < n; ++u) add(u, (u + j) % n);
        for (int j = 1; j <= k / 2; ++j) {
            for (int u = 0; u < n; ++u) {
                const int v = (u + j) % n;
                if (rng.uniform() >= p_rewire) continue;
                if (static_cast<int>(adj[u].size()) >= n - 1) continue; // no non-neighbour left
                int w;
                do {
                    w = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(n)));
                } while (w == u || adj[u].count(w) != 0);
                remove(u, v);
                add(u, w);
            }
        }
        std::vector<std::pair<int, int>> edges;
        for (int u = 0; u < n; ++u)
            for (int v : adj[u])
                if (u < v) edges.emplace_back(u, v);
        gs.graphs.push_back(make_graph(n, std::move(edges)));
    }
    return gs;
}

/// Two Erdos-Renyi communities with sizes in [c_min, c_max] and intra-community
/// edge probability p_intra, plus floor(inter_frac * n) distinct cross edges
/// added uniformly at random.
inline GraphSet generate_community2(int count, int c_min, int c_max, double p_intra, double inter_frac, Rng& rng) {
    if (count <= 0) throw ValidationError("generate_community2: count must be positive");
    if (c_min < 1 || c_min > c_max) throw ValidationError("generate_community2: need 1 <= c_min <= c_max");
    if (p_intra <= 0.0 || p_intra > 1.0) throw ValidationError("generate_community2: need 0 < p_intra <= 1");
    if (inter_frac < 0.0) throw ValidationError("generate_community2: inter_frac must be non-negative");
    GraphSet gs;
    gs.provenance = {"community2",
                     {{"count", double(count)},
                      {"c_min", double(c_min)},
                      {"c_max", double(c_max)},
                      {"p_intra", p_intra},
                      {"inter_frac", inter_frac}},
                     rng.seed()};
    gs.graphs.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const int c1 = detail::draw_size(c_min, c_max, rng);
        const int c2 = detail::draw_size(c_min, c_max, rng);
        const int n = c1 + c2;
        std::vector<std::pair<int, int>> edges;
        auto fill_er = [&](int lo, int hi) {
            for (int u = lo; u < hi; ++u)
                for (int v = u + 1; v < hi; ++v)
                    if (rng.uniform() < p_intra) edges.emplace_back(u, v);
        };
        fill_er(0, c1);
        fill_er(c1, n);
        const auto inter_edges = static_cast<std::int64_t>(std::floor(inter_frac * n));
        const std::int64_t cross_pairs = static_cast<std::int64_t>(c1) * c2;
        if (inter_edges > cross_pairs)
            throw ValidationError("generate_community2: requested " + std::to_string(inter_edges) +
                                  " inter edges but only " + std::to_string(cross_pairs) + " cross pairs exist");
        std::set<std::pair<int, int>> chosen;
        while (static_cast<std::int64_t>(chosen.size()) < inter_edges) {
            const int u = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(c1)));
            const int v = c1 + static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(c2)));
            chosen.emplace(u, v);
        }
        edges.insert(edges.end(), chosen.begin(), chosen.end());
        gs.graphs.push_back(make_graph(n, std::move(edges)));
    }
    return gs;
}

namespace detail {

inline Graph grid_graph(int rows, int cols) {
    std::vector<std::pair<int, int>> edges;
    auto id = [cols](int r, int c) { return r * cols + c; };
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            if (c + 1 < cols) edges.emplace_back(id(r, c), id(r, c + 1));
            if (r + 1 < rows) edges.emplace_back(id(r, c), id(r + 1, c));
        }
    return make_graph(rows * cols, std::move(edges));
}

inline Graph ladder_graph(int rungs) {
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i + 1 < rungs; ++i) {
        edges.emplace_back(i, i + 1);
        edges.emplace_back(rungs + i, rungs + i + 1);
    }
    for (int i = 0; i < rungs; ++i) edges.emplace_back(i, rungs + i);
    return make_graph(2 * rungs, std::move(edges));
}

} // namespace detail

/// 2D grid graphs. Admissible shapes (rows <= cols, rows >= 2, rows*cols in
/// [n_min, n_max]) are enumerated in ascending (n, rows) order and cycled when
/// count exceeds the number of distinct shapes.
inline GraphSet generate_grid(int count, int n_min, int n_max) {
    if (count <= 0) throw ValidationError("generate_grid: count must be positive");
    std::vector<std::pair<int, int>> shapes; // (rows, cols)
    for (int rows = 2; rows * rows <= n_max; ++rows)
        for (int cols = rows; rows * cols <= n_max; ++cols)
            if (rows * cols >= n_min) shapes.emplace_back(rows, cols);
    std::sort(shapes.begin(), shapes.end(), [](auto a, auto b) {
        return std::pair(a.first * a.second, a.first) < std::pair(b.first * b.second, b.first);
    });
    if (shapes.empty())
        throw ValidationError("generate_grid: no admissible (rows, cols) shape in [" + std::to_string(n_min) +
                              "," + std::to_string(n_max) + "]");
    GraphSet gs;
    gs.provenance = {"grid", {{"count", double(count)}, {"n_min", double(n_min)}, {"n_max", double(n_max)}}, 0};
    gs.graphs.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const auto [rows, cols] = shapes[static_cast<std::size_t>(i) % shapes.size()];
        gs.graphs.push_back(detail::grid_graph(rows, cols));
    }
    return gs;
}

/// Ladder graphs: m rungs give n = 2m nodes and 3m - 2 edges. Rung counts in
/// [ceil(n_min/2), floor(n_max/2)] are enumerated ascending and cycled.
inline GraphSet generate_ladder(int count, int n_min, int n_max) {
    if (count <= 0) throw ValidationError("generate_ladder: count must be positive");
    const int m_min = std::max(1, (n_min + 1) / 2);
    const int m_max = n_max / 2;
    if (m_min > m_max)
        throw ValidationError("generate_ladder: no admissible rung count in [" + std::to_string(n_min) + "," +
                              std::to_string(n_max) + "]");
    GraphSet gs;
    gs.provenance = {"ladder", {{"count", double(count)}, {"n_min", double(n_min)}, {"n_max", double(n_max)}}, 0};
    gs.graphs.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const int m = m_min + i % (m_max - m_min + 1);
        gs.graphs.push_back(detail::ladder_graph(m));
    }
    return gs;
}

/// Matched Erdos-Renyi baseline: one ER graph per reference graph g, with
/// n = max node count over the reference set and p = e_g / n_g^2.
inline GraphSet generate_er_matched(const GraphSet& reference, Rng& rng) {
    if (reference.graphs.empty()) throw ValidationError("generate_er_matched: empty reference set");
    int n = 0;
    for (const auto& g : reference.graphs) n = std::max(n, g.n);
    GraphSet gs;
    gs.provenance = {"er_matched",
                     {{"count", double(reference.graphs.size())}, {"n", double(n)}},
                     rng.seed()};
    gs.graphs.reserve(reference.graphs.size());
    for (const auto& ref : reference.graphs) {
        const double p =
            ref.n > 0 ? static_cast<double>(ref.edge_count()) / (static_cast<double>(ref.n) * ref.n) : 0.0;
        std::vector<std::pair<int, int>> edges;
        for (int u = 0; u < n; ++u)
            for (int v = u + 1; v < n; ++v)
                if (rng.uniform() < p) edges.emplace_back(u, v);
        gs.graphs.push_back(make_graph(n, std::move(edges)));
    }
    return gs;
}

struct PerturbResult {
    Graph graph;
    int requested = 0; // round(fraction * e)
    int skipped = 0;   // rewires skipped because no non-neighbour was available
};

/// Rewires round(fraction * e) edges chosen uniformly without replacement.
/// A selected edge (u, v) with u < v keeps endpoint u and moves the other end
/// to a uniform non-neighbour of u. Node and edge counts are preserved.
inline PerturbResult perturb(const Graph& g, double fraction, Rng& rng) {
    if (fraction < 0.0 || fraction > 1.0) throw ValidationError("perturb: fraction outside [0,1]");
    const int e = g.edge_count();
    const int m = static_cast<int>(std::llround(fraction * e));
    std::vector<int> indices(static_cast<std::size_t>(e));
    for (int i = 0; i < e; ++i) indices[static_cast<std::size_t>(i)] = i;
    // partial Fisher-Yates: first m entries are the selected edges
    for (int i = 0; i < m; ++i) {
        const auto j = i + static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(e - i)));
        std::swap(indices[static_cast<std::size_t>(i)], indices[static_cast<std::size_t>(j)]);
    }
    std::vector<std::set<int>> adj(static_cast<std::size_t>(g.n));
    for (const auto& [u, v] : g.edges) {
        adj[u].insert(v);
        adj[v].insert(u);
    }
    PerturbResult result;
    result.requested = m;
    for (int i = 0; i < m; ++i) {
        const auto [u, v] = g.edges[static_cast<std::size_t>(indices[static_cast<std::size_t>(i)])];
        if (static_cast<int>(adj[u].size()) >= g.n - 1) {
            ++result.skipped;
            continue;
        }
        int w;
        do {
            w = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(g.n)));
        } while (w == u || adj[u].count(w) != 0);
        adj[u].erase(v);
        adj[v].erase(u);
        adj[u].insert(w);
        adj[w].insert(u);
    }
    std::vector<std::pair<int, int>> edges;
    edges.reserve(static_cast<std::size_t>(e));
    for (int u = 0; u < g.n; ++u)
        for (int v : adj[u])
            if (u < v) edges.emplace_back(u, v);
    result.graph = make_graph(g.n, std::move(edges));
    return result;
}

/// Applies perturb() to every graph of a set with one child stream per graph.
inline GraphSet perturb_set(const GraphSet& gs, double fraction, Rng& rng) {
    GraphSet out;
    out.label = gs.label;
    out.provenance = gs.provenance;
    out.provenance.generator = gs.provenance.generator + "+perturb";
    out.provenance.params["fraction"] = fraction;
    out.provenance.seed = rng.seed();
    out.graphs.reserve(gs.graphs.size());
    for (std::size_t i = 0; i < gs.graphs.size(); ++i) {
        Rng child = rng.child(i);
        out.graphs.push_back(perturb(gs.graphs[i], fraction, child).graph);
    }
    return out;
}

} // namespace ggeval

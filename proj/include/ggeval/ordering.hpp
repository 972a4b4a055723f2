#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "ggeval/graph.hpp"
#include "ggeval/rng.hpp"

namespace ggeval {

enum class OrderPolicy { Default, DegreeDescent, BfsDeg, DfsDeg, Kcore, BfsRandom, DfsRandom, Uniform };

inline const char* to_string(OrderPolicy p) {
    switch (p) {
        case OrderPolicy::Default: return "default";
        case OrderPolicy::DegreeDescent: return "degree-descent";
        case OrderPolicy::BfsDeg: return "bfs-deg";
        case OrderPolicy::DfsDeg: return "dfs-deg";
        case OrderPolicy::Kcore: return "kcore";
        case OrderPolicy::BfsRandom: return "bfs-random";
        case OrderPolicy::DfsRandom: return "dfs-random";
        case OrderPolicy::Uniform: return "uniform";
    }
    return "?";
}

inline OrderPolicy order_policy_from_string(const std::string& s) {
    if (s == "default") return OrderPolicy::Default;
    if (s == "degree-descent") return OrderPolicy::DegreeDescent;
    if (s == "bfs-deg") return OrderPolicy::BfsDeg;
    if (s == "dfs-deg") return OrderPolicy::DfsDeg;
    if (s == "kcore") return OrderPolicy::Kcore;
    if (s == "bfs-random") return OrderPolicy::BfsRandom;
    if (s == "dfs-random") return OrderPolicy::DfsRandom;
    if (s == "uniform") return OrderPolicy::Uniform;
    throw ValidationError("unknown ordering policy '" + s + "'");
}

/// permutation[i] = original node id placed at position i.
struct NodeOrdering {
    std::vector<int> permutation;
    OrderPolicy policy = OrderPolicy::Default;
};

/// Core number per node by peeling in non-decreasing current-degree order
/// (lazy-deletion heap; stale entries are skipped).
inline std::vector<int> core_numbers(const Graph& g) {
    std::vector<int> degree(static_cast<std::size_t>(g.n));
    std::vector<int> core(static_cast<std::size_t>(g.n), 0);
    std::priority_queue<std::pair<int, int>, std::vector<std::pair<int, int>>, std::greater<>> heap;
    for (int v = 0; v < g.n; ++v) {
        degree[v] = g.degree(v);
        heap.emplace(degree[v], v);
    }
    std::vector<bool> removed(static_cast<std::size_t>(g.n), false);
    int current = 0;
    while (!heap.empty()) {
        const auto [d, v] = heap.top();
        heap.pop();
        if (removed[v] || d != degree[v]) continue;
        current = std::max(current, degree[v]);
        core[v] = current;
        removed[v] = true;
        for (int u : g.adjacency[v]) {
            if (removed[u]) continue;
            heap.emplace(--degree[u], u);
        }
    }
    return core;
}

namespace detail {

// BFS over `allowed` nodes from `root`; neighbours are visited in ascending id.
inline void bfs_into(const Graph& g, int root, const std::vector<bool>& allowed, std::vector<bool>& visited,
                     std::vector<int>& out) {
    std::deque<int> queue{root};
    visited[root] = true;
    while (!queue.empty()) {
        const int u = queue.front();
        queue.pop_front();
        out.push_back(u);
        for (int v : g.adjacency[u]) {
            if (!allowed[v] || visited[v]) continue;
            visited[v] = true;
            queue.push_back(v);
        }
    }
}

// Iterative DFS preorder matching the recursive definition with ascending
// neighbour visits.
inline void dfs_into(const Graph& g, int root, const std::vector<bool>& allowed, std::vector<bool>& visited,
                     std::vector<int>& out) {
    std::vector<std::pair<int, std::size_t>> stack{{root, 0}};
    visited[root] = true;
    out.push_back(root);
    while (!stack.empty()) {
        auto& [u, next] = stack.back();
        bool descended = false;
        while (next < g.adjacency[u].size()) {
            const int v = g.adjacency[u][next++];
            if (!allowed[v] || visited[v]) continue;
            visited[v] = true;
            out.push_back(v);
            stack.emplace_back(v, 0);
            descended = true;
            break;
        }
        if (!descended) stack.pop_back();
    }
}

// Component representatives in order of smallest member id, restricted to
// `allowed` nodes.
inline std::vector<std::vector<int>> components_of(const Graph& g, const std::vector<bool>& allowed) {
    std::vector<std::vector<int>> comps;
    std::vector<bool> seen(static_cast<std::size_t>(g.n), false);
    for (int s = 0; s < g.n; ++s) {
        if (!allowed[s] || seen[s]) continue;
        std::vector<int> comp;
        bfs_into(g, s, allowed, seen, comp);
        comps.push_back(std::move(comp));
    }
    return comps;
}

// Highest-degree node of a component, ties towards the lowest id.
inline int max_degree_root(const Graph& g, const std::vector<int>& comp) {
    int best = comp.front();
    for (int v : comp)
        if (g.degree(v) > g.degree(best) || (g.degree(v) == g.degree(best) && v < best)) best = v;
    return best;
}

inline std::vector<int> traversal_order(const Graph& g, const std::vector<bool>& allowed, bool depth_first,
                                        bool random_root, Rng& rng) {
    std::vector<int> order;
    std::vector<bool> visited(static_cast<std::size_t>(g.n), false);
    for (const auto& comp : components_of(g, allowed)) {
        const int root = random_root ? comp[rng.uniform_below(comp.size())] : max_degree_root(g, comp);
        if (depth_first)
            dfs_into(g, root, allowed, visited, order);
        else
            bfs_into(g, root, allowed, visited, order);
    }
    return order;
}

} // namespace detail

/// Node ordering under the given policy. Components are processed in order of
/// their smallest node id; traversal neighbours are visited in ascending id.
inline NodeOrdering order(const Graph& g, OrderPolicy policy, Rng& rng) {
    NodeOrdering result;
    result.policy = policy;
    auto& perm = result.permutation;
    perm.reserve(static_cast<std::size_t>(g.n));
    const std::vector<bool> all(static_cast<std::size_t>(g.n), true);

    switch (policy) {
        case OrderPolicy::Default: {
            for (int v = 0; v < g.n; ++v) perm.push_back(v);
            break;
        }
        case OrderPolicy::Uniform: {
            for (int v = 0; v < g.n; ++v) perm.push_back(v);
            shuffle(perm, rng);
            break;
        }
        case OrderPolicy::DegreeDescent: {
            for (int v = 0; v < g.n; ++v) perm.push_back(v);
            std::stable_sort(perm.begin(), perm.end(), [&](int a, int b) {
                return std::pair(-g.degree(a), a) < std::pair(-g.degree(b), b);
            });
            break;
        }
        case OrderPolicy::BfsDeg:
            perm = detail::traversal_order(g, all, false, false, rng);
            break;
        case OrderPolicy::DfsDeg:
            perm = detail::traversal_order(g, all, true, false, rng);
            break;
        case OrderPolicy::BfsRandom:
            perm = detail::traversal_order(g, all, false, true, rng);
            break;
        case OrderPolicy::DfsRandom:
            perm = detail::traversal_order(g, all, true, true, rng);
            break;
        case OrderPolicy::Kcore: {
            // shells in descending core number; within a shell, BFS over the
            // induced subgraph from its highest-degree node
            const auto core = core_numbers(g);
            int max_core = 0;
            for (int v = 0; v < g.n; ++v) max_core = std::max(max_core, core[v]);
            for (int c = max_core; c >= 0; --c) {
                std::vector<bool> shell(static_cast<std::size_t>(g.n), false);
                bool any = false;
                for (int v = 0; v < g.n; ++v)
                    if (core[v] == c) shell[v] = any = true;
                if (!any) continue;
                auto part = detail::traversal_order(g, shell, false, false, rng);
                perm.insert(perm.end(), part.begin(), part.end());
            }
            break;
        }
    }

    // bijection check
    std::vector<bool> seen(static_cast<std::size_t>(g.n), false);
    if (static_cast<int>(perm.size()) != g.n) throw NumericalError("order: permutation size mismatch");
    for (int v : perm) {
        if (v < 0 || v >= g.n || seen[v]) throw NumericalError("order: permutation is not a bijection");
        seen[v] = true;
    }
    return result;
}

/// Maximum index gap |pos(u) - pos(v)| over edges under the ordering.
inline int bandwidth(const Graph& g, const NodeOrdering& pi) {
    if (static_cast<int>(pi.permutation.size()) != g.n) throw ValidationError("bandwidth: ordering size mismatch");
    std::vector<int> pos(static_cast<std::size_t>(g.n));
    for (int i = 0; i < g.n; ++i) pos[pi.permutation[i]] = i;
    int band = 0;
    for (const auto& [u, v] : g.edges) band = std::max(band, std::abs(pos[u] - pos[v]));
    return band;
}

/// Rows of the permuted adjacency matrix below the diagonal. Row i covers the
/// min(i, truncation_m) positions immediately before i.
struct AdjacencySequence {
    int n = 0;
    std::optional<int> truncation_m;
    int source_edges = 0;
    std::vector<std::vector<std::uint8_t>> rows;
};

inline AdjacencySequence encode_sequence(const Graph& g, const NodeOrdering& pi,
                                         std::optional<int> truncation_m = std::nullopt) {
    if (static_cast<int>(pi.permutation.size()) != g.n)
        throw ValidationError("encode_sequence: ordering size mismatch");
    if (truncation_m && *truncation_m < 0) throw ValidationError("encode_sequence: negative truncation");
    std::vector<int> pos(static_cast<std::size_t>(g.n));
    for (int i = 0; i < g.n; ++i) pos[pi.permutation[i]] = i;
    AdjacencySequence seq;
    seq.n = g.n;
    seq.truncation_m = truncation_m;
    seq.source_edges = g.edge_count();
    seq.rows.resize(static_cast<std::size_t>(g.n));
    for (int i = 0; i < g.n; ++i) {
        const int len = truncation_m ? std::min(i, *truncation_m) : i;
        seq.rows[static_cast<std::size_t>(i)].assign(static_cast<std::size_t>(len), 0);
    }
    for (const auto& [u, v] : g.edges) {
        int a = pos[u], b = pos[v];
        if (a > b) std::swap(a, b);
        auto& row = seq.rows[static_cast<std::size_t>(b)];
        const int offset = b - static_cast<int>(row.size()); // first position covered by the row
        if (a >= offset) row[static_cast<std::size_t>(a - offset)] = 1;
    }
    return seq;
}

/// Rebuilds the permuted graph from a sequence. When the truncation dropped
/// edges the decoded edge count disagrees with the source count; that loss is
/// reported unless allow_loss is set.
inline Graph decode_sequence(const AdjacencySequence& seq, bool allow_loss = false) {
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < seq.n; ++i) {
        const auto& row = seq.rows[static_cast<std::size_t>(i)];
        const int offset = i - static_cast<int>(row.size());
        for (std::size_t j = 0; j < row.size(); ++j)
            if (row[j]) edges.emplace_back(offset + static_cast<int>(j), i);
    }
    Graph g = make_graph(seq.n, std::move(edges));
    if (!allow_loss && g.edge_count() != seq.source_edges)
        throw ValidationError("decode_sequence: lossy truncation, decoded " + std::to_string(g.edge_count()) +
                              " of " + std::to_string(seq.source_edges) + " edges");
    return g;
}

} // namespace ggeval

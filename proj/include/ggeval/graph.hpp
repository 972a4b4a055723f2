#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ggeval/errors.hpp"

namespace ggeval {

/// Undirected simple graph. Edges are stored normalized (u < v, sorted
/// lexicographically); adjacency lists are kept in sync and sorted.
struct Graph {
    int n = 0;
    std::vector<std::pair<int, int>> edges;
    std::vector<std::vector<int>> adjacency;

    int edge_count() const { return static_cast<int>(edges.size()); }
    int degree(int v) const { return static_cast<int>(adjacency[v].size()); }

    bool has_edge(int u, int v) const {
        if (u < 0 || v < 0 || u >= n || v >= n || u == v) return false;
        const auto& nbrs = adjacency[u];
        return std::binary_search(nbrs.begin(), nbrs.end(), v);
    }

    int max_degree() const {
        int d = 0;
        for (const auto& nbrs : adjacency) d = std::max(d, static_cast<int>(nbrs.size()));
        return d;
    }

    bool operator==(const Graph& other) const { return n == other.n && edges == other.edges; }
};

/// Builds a validated Graph from a raw edge list. Pairs are normalized to
/// u < v; self-loops, duplicates, and out-of-range endpoints are rejected.
inline Graph make_graph(int n, std::vector<std::pair<int, int>> raw_edges) {
    if (n < 0) throw ValidationError("graph: negative node count");
    for (auto& [u, v] : raw_edges) {
        if (u == v) throw ValidationError("graph: self-loop at node " + std::to_string(u));
        if (u < 0 || v < 0 || u >= n || v >= n)
            throw ValidationError("graph: edge endpoint out of range: (" + std::to_string(u) + "," +
                                  std::to_string(v) + ") with n=" + std::to_string(n));
        if (u > v) std::swap(u, v);
    }
    std::sort(raw_edges.begin(), raw_edges.end());
    const auto dup = std::adjacent_find(raw_edges.begin(), raw_edges.end());
    if (dup != raw_edges.end())
        throw ValidationError("graph: duplicate edge (" + std::to_string(dup->first) + "," +
                              std::to_string(dup->second) + ")");
    Graph g;
    g.n = n;
    g.edges = std::move(raw_edges);
    g.adjacency.assign(static_cast<std::size_t>(n), {});
    for (const auto& [u, v] : g.edges) {
        g.adjacency[u].push_back(v);
        g.adjacency[v].push_back(u);
    }
    for (auto& nbrs : g.adjacency) std::sort(nbrs.begin(), nbrs.end());
    return g;
}

// Structural invariant check; throws ValidationError on violation.
inline void validate(const Graph& g) {
    Graph rebuilt = make_graph(g.n, g.edges);
    std::size_t degree_sum = 0;
    for (int v = 0; v < g.n; ++v) {
        if (g.adjacency[v] != rebuilt.adjacency[v])
            throw ValidationError("graph: adjacency out of sync at node " + std::to_string(v));
        degree_sum += g.adjacency[v].size();
    }
    if (degree_sum != 2 * g.edges.size()) throw ValidationError("graph: degree sum != 2*edges");
}

/// Relabels g so that the node at position i of `perm` becomes node i.
/// `perm` maps position -> original node id and must be a bijection.
inline Graph permuted(const Graph& g, std::span<const int> perm) {
    if (static_cast<int>(perm.size()) != g.n) throw ValidationError("permuted: size mismatch");
    std::vector<int> pos(static_cast<std::size_t>(g.n), -1);
    for (int i = 0; i < g.n; ++i) {
        const int original = perm[static_cast<std::size_t>(i)];
        if (original < 0 || original >= g.n || pos[original] != -1)
            throw ValidationError("permuted: not a bijection");
        pos[original] = i;
    }
    std::vector<std::pair<int, int>> relabeled;
    relabeled.reserve(g.edges.size());
    for (const auto& [u, v] : g.edges) relabeled.emplace_back(pos[u], pos[v]);
    return make_graph(g.n, std::move(relabeled));
}

/// Where a graph set came from: generator name, numeric parameters, seed.
struct Provenance {
    std::string generator;
    std::map<std::string, double> params;
    std::uint64_t seed = 0;

    bool operator==(const Provenance&) const = default;
};

/// Labeled, ordered collection of graphs from one source.
struct GraphSet {
    std::vector<Graph> graphs;
    int label = 0;
    Provenance provenance;
};

} // namespace ggeval

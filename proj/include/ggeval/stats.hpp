#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "ggeval/graph.hpp"
#include "ggeval/linalg.hpp"

namespace ggeval {

/// Binned distribution. When normalized, counts sum to 1 unless the
/// histogram is empty (all-zero stays all-zero).
struct Histogram {
    std::vector<double> bin_edges; // ascending, size = counts.size() + 1
    std::vector<double> counts;
    bool normalized = false;
};

namespace detail {

inline void normalize(Histogram& h) {
    double total = 0.0;
    for (double c : h.counts) total += c;
    if (total > 0.0)
        for (double& c : h.counts) c /= total;
    h.normalized = true;
}

} // namespace detail

/// Integer-binned node degree distribution; bin i holds degree i.
/// max_bins must exceed the maximum degree.
inline Histogram degree_histogram(const Graph& g, int max_bins) {
    if (max_bins <= g.max_degree())
        throw ValidationError("degree_histogram: max_bins " + std::to_string(max_bins) +
                              " <= max degree " + std::to_string(g.max_degree()));
    Histogram h;
    h.bin_edges.resize(static_cast<std::size_t>(max_bins) + 1);
    for (int i = 0; i <= max_bins; ++i) h.bin_edges[i] = i;
    h.counts.assign(static_cast<std::size_t>(max_bins), 0.0);
    for (int v = 0; v < g.n; ++v) h.counts[static_cast<std::size_t>(g.degree(v))] += 1.0;
    detail::normalize(h);
    return h;
}

/// Triangles through each node, by sorted-adjacency pair lookups.
inline std::vector<std::int64_t> triangle_counts(const Graph& g) {
    std::vector<std::int64_t> tri(static_cast<std::size_t>(g.n), 0);
    for (int v = 0; v < g.n; ++v) {
        const auto& nbrs = g.adjacency[v];
        for (std::size_t i = 0; i < nbrs.size(); ++i)
            for (std::size_t j = i + 1; j < nbrs.size(); ++j)
                if (g.has_edge(nbrs[i], nbrs[j])) ++tri[v];
    }
    return tri;
}

/// Local clustering coefficients c(v) = 2 tri(v) / (deg (deg-1)), zero for
/// degree < 2, binned over [0, 1].
inline Histogram clustering_histogram(const Graph& g, int bins = 100) {
    if (bins < 1) throw ValidationError("clustering_histogram: bins must be >= 1");
    Histogram h;
    h.bin_edges.resize(static_cast<std::size_t>(bins) + 1);
    for (int i = 0; i <= bins; ++i) h.bin_edges[i] = static_cast<double>(i) / bins;
    h.counts.assign(static_cast<std::size_t>(bins), 0.0);
    const auto tri = triangle_counts(g);
    for (int v = 0; v < g.n; ++v) {
        const int d = g.degree(v);
        const double c = d < 2 ? 0.0 : 2.0 * static_cast<double>(tri[v]) / (static_cast<double>(d) * (d - 1));
        const int bin = std::min(bins - 1, static_cast<int>(c * bins));
        h.counts[static_cast<std::size_t>(bin)] += 1.0;
    }
    detail::normalize(h);
    return h;
}

// Orbit indices follow the standard numbering of connected graphlets with
// 2-4 nodes: 0 edge; 1/2 path ends/middle; 3 triangle; 4/5 P4 ends/middle;
// 6/7 claw leaf/center; 8 C4; 9/10/11 paw tail/rim/apex; 12/13 diamond
// rim/apex; 14 K4.
inline constexpr int kOrbitCount = 15;

namespace detail {

// Orbit of `member` inside the induced subgraph `sub` (2-4 nodes), from the
// induced edge count and the member's induced degree.
template <typename DegreeOf>
int classify_orbit(int sub_size, int induced_edges, int member_degree, DegreeOf&& max_deg) {
    if (sub_size == 2) return 0;
    if (sub_size == 3) {
        if (induced_edges == 3) return 3;
        return member_degree == 2 ? 2 : 1; // path
    }
    switch (induced_edges) {
        case 3: // tree: claw or P4
            if (max_deg() == 3) return member_degree == 3 ? 7 : 6;
            return member_degree == 2 ? 5 : 4;
        case 4: // cycle or paw
            if (max_deg() == 3) {
                if (member_degree == 1) return 9;
                return member_degree == 2 ? 10 : 11;
            }
            return 8;
        case 5: return member_degree == 2 ? 12 : 13; // diamond
        case 6: return 14;                           // K4
        default: throw NumericalError("classify_orbit: impossible induced edge count");
    }
}

// ESU enumeration state: every connected induced subgraph of size 2..4 whose
// minimum node is `root` is visited exactly once.
struct EsuState {
    const Graph* g = nullptr;
    int root = 0;
    std::array<int, 4> members{};
    int size = 0;
    std::vector<std::int64_t>* counts = nullptr; // n * kOrbitCount, row-major

    void record() {
        int induced_edges = 0;
        std::array<int, 4> deg{};
        for (int i = 0; i < size; ++i)
            for (int j = i + 1; j < size; ++j)
                if (g->has_edge(members[i], members[j])) {
                    ++induced_edges;
                    ++deg[i];
                    ++deg[j];
                }
        auto max_deg = [&] {
            int m = 0;
            for (int i = 0; i < size; ++i) m = std::max(m, deg[i]);
            return m;
        };
        for (int i = 0; i < size; ++i) {
            const int orbit = classify_orbit(size, induced_edges, deg[i], max_deg);
            (*counts)[static_cast<std::size_t>(members[i]) * kOrbitCount + orbit] += 1;
        }
    }

    // extension holds the candidate nodes of the current frame; in_hood marks
    // the subgraph together with its already-seen neighbourhood beyond root.
    void extend(const std::vector<int>& extension, std::vector<bool>& in_hood) {
        if (size >= 2) record();
        if (size == 4) return;
        for (std::size_t pick = 0; pick < extension.size(); ++pick) {
            const int w = extension[pick];
            std::vector<int> next(extension.begin() + static_cast<std::ptrdiff_t>(pick) + 1, extension.end());
            const std::size_t fresh_start = next.size();
            for (int u : g->adjacency[w]) {
                if (u <= root || in_hood[u]) continue;
                next.push_back(u);
                in_hood[u] = true;
            }
            members[size++] = w;
            extend(next, in_hood);
            --size;
            for (std::size_t i = fresh_start; i < next.size(); ++i) in_hood[next[i]] = false;
        }
    }
};

} // namespace detail

/// Per-node membership counts in each orbit of connected graphlets with up to
/// four nodes, by exhaustive enumeration (ESU). Graphs above the node cap are
/// refused rather than sampled.
inline std::vector<std::array<std::int64_t, kOrbitCount>> orbit4_counts(const Graph& g, int node_cap = 500) {
    if (g.n > node_cap)
        throw ValidationError("orbit4_counts: n=" + std::to_string(g.n) + " exceeds cap " +
                              std::to_string(node_cap));
    std::vector<std::int64_t> flat(static_cast<std::size_t>(g.n) * kOrbitCount, 0);
    std::vector<bool> in_hood(static_cast<std::size_t>(g.n), false);
    for (int root = 0; root < g.n; ++root) {
        detail::EsuState state;
        state.g = &g;
        state.root = root;
        state.counts = &flat;
        state.members[0] = root;
        state.size = 1;
        std::vector<int> extension;
        in_hood[root] = true;
        for (int u : g.adjacency[root])
            if (u > root) {
                extension.push_back(u);
                in_hood[u] = true;
            }
        state.extend(extension, in_hood);
        in_hood[root] = false;
        for (int u : extension) in_hood[u] = false;
    }
    std::vector<std::array<std::int64_t, kOrbitCount>> out(static_cast<std::size_t>(g.n));
    for (int v = 0; v < g.n; ++v)
        for (int o = 0; o < kOrbitCount; ++o) out[v][o] = flat[static_cast<std::size_t>(v) * kOrbitCount + o];
    return out;
}

/// Mean orbit-count vector over nodes; with four_node_only, orbits 0-3 are
/// masked out and only the 11 orbits of 4-node graphlets remain.
inline std::vector<double> mean_orbit_vector(const Graph& g, int node_cap = 500, bool four_node_only = false) {
    const auto counts = orbit4_counts(g, node_cap);
    const int first = four_node_only ? 4 : 0;
    std::vector<double> mean(static_cast<std::size_t>(kOrbitCount - first), 0.0);
    if (g.n == 0) return mean;
    for (const auto& row : counts)
        for (int o = first; o < kOrbitCount; ++o) mean[static_cast<std::size_t>(o - first)] += row[o];
    for (double& m : mean) m /= g.n;
    return mean;
}

/// Eigenvalues of the symmetric normalized Laplacian I - D^{-1/2} A D^{-1/2}.
/// Isolated nodes contribute eigenvalue 0.
inline std::vector<double> laplacian_spectrum(const Graph& g) {
    const int n = g.n;
    Matrix lap(n, n);
    std::vector<double> inv_sqrt_deg(static_cast<std::size_t>(n), 0.0);
    for (int v = 0; v < n; ++v) {
        const int d = g.degree(v);
        if (d > 0) {
            lap(v, v) = 1.0;
            inv_sqrt_deg[v] = 1.0 / std::sqrt(static_cast<double>(d));
        }
    }
    for (const auto& [u, v] : g.edges) {
        const double w = -inv_sqrt_deg[u] * inv_sqrt_deg[v];
        lap(u, v) = w;
        lap(v, u) = w;
    }
    return symmetric_eigen(std::move(lap)).values;
}

/// Spectrum of the normalized Laplacian histogrammed over [0, 2].
inline Histogram laplacian_spectrum_histogram(const Graph& g, int bins = 200) {
    if (bins < 1) throw ValidationError("laplacian_spectrum_histogram: bins must be >= 1");
    Histogram h;
    h.bin_edges.resize(static_cast<std::size_t>(bins) + 1);
    for (int i = 0; i <= bins; ++i) h.bin_edges[i] = 2.0 * i / bins;
    h.counts.assign(static_cast<std::size_t>(bins), 0.0);
    for (double lambda : laplacian_spectrum(g)) {
        const int bin = std::clamp(static_cast<int>(lambda / 2.0 * bins), 0, bins - 1);
        h.counts[static_cast<std::size_t>(bin)] += 1.0;
    }
    detail::normalize(h);
    return h;
}

} // namespace ggeval

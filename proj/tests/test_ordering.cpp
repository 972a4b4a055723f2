#include <catch2/catch_amalgamated.hpp>

#include "ggeval/generators.hpp"
#include "ggeval/ordering.hpp"
#include "oracles.hpp"

using namespace ggeval;

namespace {

const std::vector<OrderPolicy> kAllPolicies{
    OrderPolicy::Default,   OrderPolicy::DegreeDescent, OrderPolicy::BfsDeg,    OrderPolicy::DfsDeg,
    OrderPolicy::Kcore,     OrderPolicy::BfsRandom,     OrderPolicy::DfsRandom, OrderPolicy::Uniform};

// Independent core numbers: largest k such that v survives iterated removal
// of nodes with degree < k.
std::vector<int> naive_core_numbers(const Graph& g) {
    std::vector<int> core(static_cast<std::size_t>(g.n), 0);
    for (int k = 1; k <= g.n; ++k) {
        std::vector<bool> alive(static_cast<std::size_t>(g.n), true);
        bool changed = true;
        while (changed) {
            changed = false;
            for (int v = 0; v < g.n; ++v) {
                if (!alive[v]) continue;
                int deg = 0;
                for (int u : g.adjacency[v])
                    if (alive[u]) ++deg;
                if (deg < k) {
                    alive[v] = false;
                    changed = true;
                }
            }
        }
        for (int v = 0; v < g.n; ++v)
            if (alive[v]) core[v] = k;
    }
    return core;
}

} // namespace

TEST_CASE("bfs-deg on P4 roots at the tied max-degree node", "[ordering]") {
    const Graph p4 = make_graph(4, {{0, 1}, {1, 2}, {2, 3}});
    Rng rng(1);
    const auto pi = order(p4, OrderPolicy::BfsDeg, rng);
    CHECK(pi.permutation == std::vector<int>{1, 0, 2, 3});
}

TEST_CASE("default ordering is the identity", "[ordering]") {
    Rng g_rng(2);
    const auto gs = generate_ba(1, 20, 20, 4, g_rng);
    Rng rng(3);
    const auto pi = order(gs.graphs[0], OrderPolicy::Default, rng);
    for (int i = 0; i < 20; ++i) CHECK(pi.permutation[i] == i);
}

TEST_CASE("kcore on C5 reduces to the bfs order", "[ordering]") {
    const Graph c5 = make_graph(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {0, 4}});
    const auto cores = core_numbers(c5);
    for (int v = 0; v < 5; ++v) CHECK(cores[v] == 2);
    Rng rng(4);
    const auto kcore = order(c5, OrderPolicy::Kcore, rng);
    const auto bfs = order(c5, OrderPolicy::BfsDeg, rng);
    CHECK(kcore.permutation == bfs.permutation);
}

TEST_CASE("core numbers match hand and oracle values", "[ordering]") {
    const Graph s4 = make_graph(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}});
    CHECK(core_numbers(s4) == std::vector<int>{1, 1, 1, 1, 1});

    const Graph k4_pendant = make_graph(5, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}, {3, 4}});
    CHECK(core_numbers(k4_pendant) == std::vector<int>{3, 3, 3, 3, 1});

    Rng rng(5);
    for (int i = 0; i < 30; ++i) {
        const Graph g = oracle::random_graph(12, 0.3, rng);
        CHECK(core_numbers(g) == naive_core_numbers(g));
    }
}

TEST_CASE("every policy returns a bijection on random graphs", "[ordering]") {
    Rng rng(6);
    for (int i = 0; i < 20; ++i) {
        const Graph g = oracle::random_graph(15, 0.2, rng); // often disconnected
        for (const auto policy : kAllPolicies) {
            Rng prng = rng.child(static_cast<std::uint64_t>(i) * 10 + static_cast<std::uint64_t>(policy));
            const auto pi = order(g, policy, prng);
            std::vector<bool> seen(15, false);
            for (int v : pi.permutation) {
                REQUIRE(v >= 0);
                REQUIRE(v < 15);
                REQUIRE_FALSE(seen[v]);
                seen[v] = true;
            }
        }
    }
}

TEST_CASE("degree-descent output is non-increasing in degree", "[ordering]") {
    Rng rng(7);
    const Graph g = oracle::random_graph(20, 0.3, rng);
    Rng prng(8);
    const auto pi = order(g, OrderPolicy::DegreeDescent, prng);
    for (std::size_t i = 1; i < pi.permutation.size(); ++i)
        CHECK(g.degree(pi.permutation[i - 1]) >= g.degree(pi.permutation[i]));
}

TEST_CASE("traversal orders have exactly one root per component", "[ordering]") {
    Rng rng(9);
    for (int i = 0; i < 20; ++i) {
        const Graph g = oracle::random_graph(15, 0.25, rng);
        // component id per node
        std::vector<int> comp(15, -1);
        int comp_count = 0;
        for (int s = 0; s < 15; ++s) {
            if (comp[s] != -1) continue;
            std::vector<int> stack{s};
            comp[s] = comp_count;
            while (!stack.empty()) {
                const int v = stack.back();
                stack.pop_back();
                for (int u : g.adjacency[v])
                    if (comp[u] == -1) {
                        comp[u] = comp_count;
                        stack.push_back(u);
                    }
            }
            ++comp_count;
        }
        for (const auto policy :
             {OrderPolicy::BfsDeg, OrderPolicy::BfsRandom, OrderPolicy::DfsDeg, OrderPolicy::DfsRandom}) {
            Rng prng = rng.child(static_cast<std::uint64_t>(100 + i));
            const auto pi = order(g, policy, prng);
            std::vector<int> pos(15);
            for (int p = 0; p < 15; ++p) pos[pi.permutation[p]] = p;
            // every non-root node must be preceded by a neighbour of its component
            std::vector<int> rootless(static_cast<std::size_t>(comp_count), 0);
            for (int v = 0; v < 15; ++v) {
                bool has_earlier_neighbour = false;
                for (int u : g.adjacency[v]) has_earlier_neighbour |= pos[u] < pos[v];
                if (!has_earlier_neighbour) ++rootless[static_cast<std::size_t>(comp[v])];
            }
            for (int c = 0; c < comp_count; ++c) CHECK(rootless[static_cast<std::size_t>(c)] == 1);
        }
    }
}

TEST_CASE("disconnected graphs are ordered component by component", "[ordering]") {
    // two components: triangle {0,1,2} and path {3,4}
    const Graph g = make_graph(5, {{0, 1}, {1, 2}, {0, 2}, {3, 4}});
    Rng rng(10);
    const auto pi = order(g, OrderPolicy::BfsDeg, rng);
    CHECK(pi.permutation == std::vector<int>{0, 1, 2, 3, 4});
}

TEST_CASE("bandwidth of canonical orderings", "[ordering]") {
    const Graph path = make_graph(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}});
    Rng rng(11);
    const auto id = order(path, OrderPolicy::Default, rng);
    CHECK(bandwidth(path, id) == 1);

    const Graph c6 = make_graph(6, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {0, 5}});
    const auto id6 = order(c6, OrderPolicy::Default, rng);
    CHECK(bandwidth(c6, id6) == 5); // wrap edge

    // 10x10 grid: BFS keeps the band far below n-1
    const auto grid = generate_grid(1, 100, 100);
    const auto pi = order(grid.graphs[0], OrderPolicy::BfsDeg, rng);
    const int band = bandwidth(grid.graphs[0], pi);
    CHECK(band <= 20);
    CHECK(band < 99);
}

TEST_CASE("triangle encodes to the documented rows", "[ordering]") {
    const Graph k3 = make_graph(3, {{0, 1}, {1, 2}, {0, 2}});
    Rng rng(12);
    const auto pi = order(k3, OrderPolicy::Default, rng);
    const auto seq = encode_sequence(k3, pi);
    REQUIRE(seq.rows.size() == 3);
    CHECK(seq.rows[0].empty());
    CHECK(seq.rows[1] == std::vector<std::uint8_t>{1});
    CHECK(seq.rows[2] == std::vector<std::uint8_t>{1, 1});
    CHECK(decode_sequence(seq) == k3);
}

TEST_CASE("cap at n is inactive", "[ordering]") {
    Rng rng(13);
    const Graph g = oracle::random_graph(12, 0.3, rng);
    Rng prng(14);
    const auto pi = order(g, OrderPolicy::BfsDeg, prng);
    const auto full = encode_sequence(g, pi);
    const auto capped = encode_sequence(g, pi, g.n);
    CHECK(decode_sequence(full) == decode_sequence(capped));
}

TEST_CASE("truncation at the bandwidth is lossless, below it reports loss", "[ordering]") {
    const auto grid = generate_grid(1, 16, 16); // 4x4
    const Graph& g = grid.graphs[0];
    Rng rng(15);
    const auto pi = order(g, OrderPolicy::BfsDeg, rng);
    const int band = bandwidth(g, pi);
    const auto exact = encode_sequence(g, pi, band);
    CHECK(decode_sequence(exact) == permuted(g, pi.permutation));
    const auto lossy = encode_sequence(g, pi, band - 1);
    CHECK_THROWS_AS(decode_sequence(lossy), ValidationError);
    const Graph partial = decode_sequence(lossy, true);
    CHECK(partial.edge_count() < g.edge_count());
}

TEST_CASE("round trip property across policies and random graphs", "[ordering]") {
    Rng rng(16);
    for (int i = 0; i < 10; ++i) {
        const Graph g = oracle::random_graph(14, 0.25, rng);
        for (const auto policy : kAllPolicies) {
            Rng prng = rng.child(static_cast<std::uint64_t>(200 + i));
            const auto pi = order(g, policy, prng);
            const auto seq = encode_sequence(g, pi, bandwidth(g, pi));
            CHECK(decode_sequence(seq) == permuted(g, pi.permutation));
        }
    }
}

#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "ggeval/generators.hpp"
#include "ggeval/graph_io.hpp"

using namespace ggeval;

namespace {

bool is_connected(const Graph& g) {
    if (g.n == 0) return true;
    std::vector<bool> seen(static_cast<std::size_t>(g.n), false);
    std::vector<int> stack{0};
    seen[0] = true;
    int count = 1;
    while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        for (int u : g.adjacency[v])
            if (!seen[u]) {
                seen[u] = true;
                ++count;
                stack.push_back(u);
            }
    }
    return count == g.n;
}

bool is_bipartite(const Graph& g) {
    std::vector<int> colour(static_cast<std::size_t>(g.n), -1);
    for (int s = 0; s < g.n; ++s) {
        if (colour[s] != -1) continue;
        colour[s] = 0;
        std::vector<int> stack{s};
        while (!stack.empty()) {
            const int v = stack.back();
            stack.pop_back();
            for (int u : g.adjacency[v]) {
                if (colour[u] == -1) {
                    colour[u] = 1 - colour[v];
                    stack.push_back(u);
                } else if (colour[u] == colour[v]) {
                    return false;
                }
            }
        }
    }
    return true;
}

std::string serialized(const GraphSet& gs) {
    std::ostringstream out;
    write_graphset(gs, out);
    return out.str();
}

} // namespace

TEST_CASE("ba graphs have k(n-k) edges and are connected", "[generators]") {
    Rng rng(11);
    const auto gs = generate_ba(20, 30, 60, 4, rng);
    REQUIRE(gs.graphs.size() == 20);
    for (const auto& g : gs.graphs) {
        validate(g);
        CHECK(g.n >= 30);
        CHECK(g.n <= 60);
        CHECK(g.edge_count() == 4 * (g.n - 4));
        CHECK(is_connected(g));
    }
}

TEST_CASE("ba minimal case: n=5, k=4 gives 4 edges", "[generators]") {
    Rng rng(1);
    const auto gs = generate_ba(1, 5, 5, 4, rng);
    REQUIRE(gs.graphs.size() == 1);
    CHECK(gs.graphs[0].n == 5);
    CHECK(gs.graphs[0].edge_count() == 4);
}

TEST_CASE("ba degree distribution is heavy tailed", "[generators]") {
    // preferential attachment should produce hubs well above k on 200 nodes
    int tail_hits = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(seed);
        const auto gs = generate_ba(1, 200, 200, 4, rng);
        if (gs.graphs[0].max_degree() > 3 * 4) ++tail_hits;
    }
    CHECK(tail_hits == 20);
}

TEST_CASE("ba rejects bad parameters", "[generators]") {
    Rng rng(1);
    CHECK_THROWS_AS(generate_ba(0, 10, 20, 4, rng), ValidationError);
    CHECK_THROWS_AS(generate_ba(1, 10, 20, 1, rng), ValidationError);
    CHECK_THROWS_AS(generate_ba(1, 4, 20, 4, rng), ValidationError);
    CHECK_THROWS_AS(generate_ba(1, 20, 10, 4, rng), ValidationError);
}

TEST_CASE("ws graphs keep n*k/2 edges", "[generators]") {
    Rng rng(12);
    const auto gs = generate_ws(20, 30, 60, 4, 0.1, rng);
    for (const auto& g : gs.graphs) {
        validate(g);
        CHECK(g.edge_count() == g.n * 4 / 2);
    }
}

TEST_CASE("ws with no rewiring is the 4-regular ring", "[generators]") {
    Rng rng(3);
    const auto gs = generate_ws(1, 10, 10, 4, 0.0, rng);
    const Graph& g = gs.graphs[0];
    CHECK(g.edge_count() == 20);
    for (int v = 0; v < g.n; ++v) CHECK(g.degree(v) == 4);
    CHECK(g.has_edge(0, 1));
    CHECK(g.has_edge(0, 2));
    CHECK(g.has_edge(0, 9));
    CHECK(g.has_edge(0, 8));
}

TEST_CASE("ws full rewiring keeps the edge budget and spreads degrees", "[generators]") {
    Rng rng(4);
    const auto gs = generate_ws(1, 100, 100, 4, 1.0, rng);
    const Graph& g = gs.graphs[0];
    CHECK(g.edge_count() == 200);
    double mean = 0.0;
    for (int v = 0; v < g.n; ++v) mean += g.degree(v);
    mean /= g.n;
    double var = 0.0;
    for (int v = 0; v < g.n; ++v) var += (g.degree(v) - mean) * (g.degree(v) - mean);
    CHECK(var > 0.0);
}

TEST_CASE("ws rejects odd or oversized k", "[generators]") {
    Rng rng(1);
    CHECK_THROWS_AS(generate_ws(1, 10, 10, 3, 0.1, rng), ValidationError);
    CHECK_THROWS_AS(generate_ws(1, 4, 10, 4, 0.1, rng), ValidationError);
}

TEST_CASE("community2 with p=1 and no inter edges gives two cliques", "[generators]") {
    Rng rng(5);
    const auto gs = generate_community2(1, 2, 2, 1.0, 0.0, rng);
    const Graph& g = gs.graphs[0];
    CHECK(g.n == 4);
    CHECK(g.edge_count() == 2);
    CHECK(g.has_edge(0, 1));
    CHECK(g.has_edge(2, 3));
}

TEST_CASE("community2 covers the C2L and C2S parameterizations", "[generators]") {
    Rng rng(6);
    const auto c2l = generate_community2(10, 6, 10, 0.7, 0.1, rng);
    for (const auto& g : c2l.graphs) {
        validate(g);
        CHECK(g.n >= 12);
        CHECK(g.n <= 20);
    }
    Rng rng2(7);
    const auto c2s = generate_community2(5, 30, 80, 0.3, 0.05, rng2);
    for (const auto& g : c2s.graphs) {
        validate(g);
        CHECK(g.n >= 60);
        CHECK(g.n <= 160);
    }
}

TEST_CASE("community2 rejects impossible inter-edge demands", "[generators]") {
    Rng rng(8);
    // 2 + 2 nodes, 4 cross pairs, demand 2.0 * n = 8 inter edges
    CHECK_THROWS_AS(generate_community2(1, 2, 2, 1.0, 2.0, rng), ValidationError);
}

TEST_CASE("grid: smallest admissible shape is C4", "[generators]") {
    const auto gs = generate_grid(1, 4, 4);
    const Graph& g = gs.graphs[0];
    CHECK(g.n == 4);
    CHECK(g.edge_count() == 4);
    for (int v = 0; v < 4; ++v) CHECK(g.degree(v) == 2);
}

TEST_CASE("grid set: sizes in range, bipartite, edge formula", "[generators]") {
    const auto gs = generate_grid(100, 100, 400);
    REQUIRE(gs.graphs.size() == 100);
    for (const auto& g : gs.graphs) {
        validate(g);
        CHECK(g.n >= 100);
        CHECK(g.n <= 400);
        CHECK(is_bipartite(g));
        CHECK(is_connected(g));
    }
}

TEST_CASE("grid cycles through admissible shapes deterministically", "[generators]") {
    const auto a = generate_grid(7, 4, 9); // shapes: 2x2, 2x3, 2x4, 3x3(9)
    const auto b = generate_grid(7, 4, 9);
    CHECK(serialized(a) == serialized(b));
    CHECK(a.graphs[0].n == 4);
    CHECK(a.graphs[1].n == 6);
    CHECK(a.graphs[2].n == 8);
    CHECK(a.graphs[3].n == 9);
    CHECK(a.graphs[4].n == 4); // wrapped around
    CHECK_THROWS_AS(generate_grid(1, 5, 5), ValidationError); // no rows x cols = 5 with rows >= 2
}

TEST_CASE("ladder with 50 rungs has 100 nodes and 148 edges", "[generators]") {
    const auto gs = generate_ladder(1, 100, 100);
    const Graph& g = gs.graphs[0];
    CHECK(g.n == 100);
    CHECK(g.edge_count() == 148);
    CHECK(is_connected(g));
    CHECK(is_bipartite(g));
}

TEST_CASE("er matched set mirrors the reference cardinality and max n", "[generators]") {
    Rng gen_rng(13);
    const auto reference = generate_grid(100, 20, 80);
    const auto er = generate_er_matched(reference, gen_rng);
    REQUIRE(er.graphs.size() == 100);
    int max_n = 0;
    for (const auto& g : reference.graphs) max_n = std::max(max_n, g.n);
    for (const auto& g : er.graphs) {
        validate(g);
        CHECK(g.n == max_n);
    }
}

TEST_CASE("er matched with an edgeless reference is edgeless", "[generators]") {
    GraphSet ref;
    ref.graphs.push_back(make_graph(10, {}));
    Rng rng(2);
    const auto er = generate_er_matched(ref, rng);
    REQUIRE(er.graphs.size() == 1);
    CHECK(er.graphs[0].n == 10);
    CHECK(er.graphs[0].edge_count() == 0);
    CHECK_THROWS_AS(generate_er_matched(GraphSet{}, rng), ValidationError);
}

TEST_CASE("perturb at zero is the identity", "[generators]") {
    Rng g_rng(21);
    const auto gs = generate_ba(1, 30, 30, 4, g_rng);
    Rng rng(22);
    const auto r = perturb(gs.graphs[0], 0.0, rng);
    CHECK(r.graph == gs.graphs[0]);
    CHECK(r.requested == 0);
    CHECK(r.skipped == 0);
}

TEST_CASE("perturb preserves node and edge counts at every fraction", "[generators]") {
    Rng g_rng(23);
    const auto gs = generate_ws(1, 40, 40, 4, 0.1, g_rng);
    const Graph& g = gs.graphs[0];
    for (double fraction : {0.1, 0.5, 1.0}) {
        Rng rng(24);
        const auto r = perturb(g, fraction, rng);
        validate(r.graph);
        CHECK(r.graph.n == g.n);
        CHECK(r.graph.edge_count() == g.edge_count());
        CHECK(r.requested == static_cast<int>(std::llround(fraction * g.edge_count())));
    }
    Rng rng(25);
    const auto full = perturb(g, 1.0, rng);
    CHECK_FALSE(full.graph == g); // overwhelmingly likely with 80 rewires
    CHECK_THROWS_AS(perturb(g, 1.5, rng), ValidationError);
}

TEST_CASE("perturb skips nodes with saturated neighbourhoods", "[generators]") {
    // K4: every node is adjacent to all others, no rewire can land anywhere
    const Graph k4 = make_graph(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}});
    Rng rng(26);
    const auto r = perturb(k4, 1.0, rng);
    CHECK(r.graph == k4);
    CHECK(r.skipped == 6);
}

TEST_CASE("generators are deterministic per seed", "[generators]") {
    for (int which = 0; which < 3; ++which) {
        Rng a(77), b(77);
        GraphSet ga, gb;
        switch (which) {
            case 0:
                ga = generate_ba(5, 20, 30, 4, a);
                gb = generate_ba(5, 20, 30, 4, b);
                break;
            case 1:
                ga = generate_ws(5, 20, 30, 4, 0.1, a);
                gb = generate_ws(5, 20, 30, 4, 0.1, b);
                break;
            default:
                ga = generate_community2(5, 6, 10, 0.7, 0.1, a);
                gb = generate_community2(5, 6, 10, 0.7, 0.1, b);
                break;
        }
        CHECK(serialized(ga) == serialized(gb));
    }
}

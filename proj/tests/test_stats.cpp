#include <catch2/catch_amalgamated.hpp>

#include <numeric>

#include "ggeval/generators.hpp"
#include "ggeval/ordering.hpp"
#include "ggeval/stats.hpp"
#include "oracles.hpp"

using namespace ggeval;

namespace {

double histogram_sum(const Histogram& h) { return std::accumulate(h.counts.begin(), h.counts.end(), 0.0); }

const Graph kC4 = make_graph(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}});
const Graph kS4 = make_graph(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}});
const Graph kK3 = make_graph(3, {{0, 1}, {1, 2}, {0, 2}});

} // namespace

TEST_CASE("degree histogram of C4 and S4", "[stats]") {
    const auto c4 = degree_histogram(kC4, 5);
    CHECK(c4.counts[2] == Catch::Approx(1.0));
    CHECK(histogram_sum(c4) == Catch::Approx(1.0).margin(1e-12));

    const auto s4 = degree_histogram(kS4, 5);
    CHECK(s4.counts[1] == Catch::Approx(0.8));
    CHECK(s4.counts[4] == Catch::Approx(0.2));

    CHECK_THROWS_AS(degree_histogram(kS4, 4), ValidationError); // max degree not covered
}

TEST_CASE("degree histogram of a BA graph has hub support", "[stats]") {
    Rng rng(51);
    const auto gs = generate_ba(1, 100, 100, 4, rng);
    const Graph& g = gs.graphs[0];
    const auto h = degree_histogram(g, g.max_degree() + 1);
    CHECK(h.counts[4] > 0.0);
    double above_ten = 0.0;
    for (std::size_t d = 11; d < h.counts.size(); ++d) above_ten += h.counts[d];
    CHECK(above_ten > 0.0);
}

TEST_CASE("clustering coefficients on the canonical small graphs", "[stats]") {
    const auto k3 = clustering_histogram(kK3, 100);
    CHECK(k3.counts[99] == Catch::Approx(1.0)); // all mass in the bin containing 1.0

    const auto s4 = clustering_histogram(kS4, 100);
    CHECK(s4.counts[0] == Catch::Approx(1.0));

    // C4 plus one diagonal: coefficients computed by brute-force triangle
    // enumeration are {2/3, 1, 2/3, 1}
    const Graph diag = make_graph(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}, {0, 2}});
    const auto tri = triangle_counts(diag);
    CHECK(tri == std::vector<std::int64_t>{2, 1, 2, 1});
    const auto h = clustering_histogram(diag, 100);
    CHECK(h.counts[66] == Catch::Approx(0.5)); // two nodes at 2/3
    CHECK(h.counts[99] == Catch::Approx(0.5)); // two nodes at 1
}

TEST_CASE("orbit counts for K3", "[stats]") {
    const auto counts = orbit4_counts(kK3);
    for (int v = 0; v < 3; ++v) {
        CHECK(counts[v][0] == 2); // endpoint of two edges
        CHECK(counts[v][3] == 1); // one triangle
        for (int o = 4; o < kOrbitCount; ++o) CHECK(counts[v][o] == 0);
    }
}

TEST_CASE("orbit counts for P4 match hand enumeration", "[stats]") {
    const Graph p4 = make_graph(4, {{0, 1}, {1, 2}, {2, 3}});
    const auto counts = orbit4_counts(p4);
    // ends
    CHECK(counts[0][0] == 1);
    CHECK(counts[0][1] == 1);
    CHECK(counts[0][2] == 0);
    CHECK(counts[0][4] == 1);
    // middles
    CHECK(counts[1][0] == 2);
    CHECK(counts[1][1] == 1);
    CHECK(counts[1][2] == 1);
    CHECK(counts[1][5] == 1);
}

TEST_CASE("empty graphs give all-zero orbit counts", "[stats]") {
    const Graph g = make_graph(4, {});
    const auto counts = orbit4_counts(g);
    for (const auto& row : counts)
        for (int o = 0; o < kOrbitCount; ++o) CHECK(row[o] == 0);
}

TEST_CASE("orbit counts equal the exhaustive oracle on random graphs", "[stats]") {
    Rng rng(52);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 2 + static_cast<int>(rng.uniform_below(11)); // up to 12 nodes
        const double p = 0.1 + 0.6 * rng.uniform();
        const Graph g = oracle::random_graph(n, p, rng);
        const auto ours = orbit4_counts(g);
        const auto reference = oracle::naive_orbit_counts(g);
        REQUIRE(ours.size() == reference.size());
        for (int v = 0; v < n; ++v)
            for (int o = 0; o < kOrbitCount; ++o) REQUIRE(ours[v][o] == reference[v][o]);
    }
}

TEST_CASE("orbit counting refuses graphs above the cap", "[stats]") {
    const Graph g = make_graph(10, {{0, 1}});
    CHECK_THROWS_AS(orbit4_counts(g, 5), ValidationError);
}

TEST_CASE("orbit mask keeps only 4-node orbits", "[stats]") {
    const auto all = mean_orbit_vector(kK3, 500, false);
    const auto four = mean_orbit_vector(kK3, 500, true);
    CHECK(all.size() == 15);
    CHECK(four.size() == 11);
    CHECK(all[0] == Catch::Approx(2.0));
    for (double v : four) CHECK(v == 0.0);
}

TEST_CASE("laplacian spectrum of K4 and disjoint edges", "[stats]") {
    const Graph k4 = make_graph(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}});
    const auto spec = laplacian_spectrum(k4);
    CHECK(spec[0] == Catch::Approx(0.0).margin(1e-10));
    for (int i = 1; i < 4; ++i) CHECK(spec[static_cast<std::size_t>(i)] == Catch::Approx(4.0 / 3.0).margin(1e-10));

    const Graph two_edges = make_graph(4, {{0, 1}, {2, 3}});
    const auto spec2 = laplacian_spectrum(two_edges);
    CHECK(spec2[0] == Catch::Approx(0.0).margin(1e-10));
    CHECK(spec2[1] == Catch::Approx(0.0).margin(1e-10));
    CHECK(spec2[2] == Catch::Approx(2.0).margin(1e-10));
    CHECK(spec2[3] == Catch::Approx(2.0).margin(1e-10));
}

TEST_CASE("grid spectrum matches the jacobi oracle", "[stats]") {
    const auto grid = generate_grid(1, 9, 9); // 3x3
    const Graph& g = grid.graphs[0];
    Matrix lap(g.n, g.n);
    for (int v = 0; v < g.n; ++v) lap(v, v) = g.degree(v) > 0 ? 1.0 : 0.0;
    for (const auto& [u, v] : g.edges) {
        const double w = -1.0 / std::sqrt(double(g.degree(u)) * double(g.degree(v)));
        lap(u, v) = w;
        lap(v, u) = w;
    }
    const auto reference = oracle::jacobi_eigenvalues(lap);
    const auto ours = laplacian_spectrum(g);
    REQUIRE(ours.size() == reference.size());
    for (std::size_t i = 0; i < ours.size(); ++i) CHECK(ours[i] == Catch::Approx(reference[i]).margin(1e-8));
}

TEST_CASE("spectrum stays in [0,2] and sums to the non-isolated count", "[stats]") {
    Rng rng(53);
    for (int trial = 0; trial < 20; ++trial) {
        const Graph g = oracle::random_graph(14, 0.25, rng);
        const auto spec = laplacian_spectrum(g);
        double sum = 0.0;
        for (double v : spec) {
            CHECK(v >= -1e-9);
            CHECK(v <= 2.0 + 1e-9);
            sum += v;
        }
        int non_isolated = 0;
        for (int v = 0; v < g.n; ++v)
            if (g.degree(v) > 0) ++non_isolated;
        CHECK(sum == Catch::Approx(double(non_isolated)).margin(1e-6));
    }
}

TEST_CASE("all statistics are invariant under node relabeling", "[stats]") {
    Rng rng(54);
    for (int trial = 0; trial < 10; ++trial) {
        const Graph g = oracle::random_graph(12, 0.3, rng);
        Rng prng = rng.child(static_cast<std::uint64_t>(trial));
        const auto pi = order(g, OrderPolicy::Uniform, prng);
        const Graph h = permuted(g, pi.permutation);

        const auto dg = degree_histogram(g, 13).counts;
        const auto dh = degree_histogram(h, 13).counts;
        CHECK(dg == dh);

        const auto cg = clustering_histogram(g).counts;
        const auto ch = clustering_histogram(h).counts;
        for (std::size_t i = 0; i < cg.size(); ++i) CHECK(cg[i] == Catch::Approx(ch[i]).margin(1e-12));

        const auto og = mean_orbit_vector(g);
        const auto oh = mean_orbit_vector(h);
        for (std::size_t i = 0; i < og.size(); ++i) CHECK(og[i] == Catch::Approx(oh[i]).margin(1e-12));

        // the spectrum itself is the invariant; histogram bins can flip when
        // an eigenvalue sits exactly on a bin edge
        const auto sg = laplacian_spectrum(g);
        const auto sh = laplacian_spectrum(h);
        for (std::size_t i = 0; i < sg.size(); ++i) CHECK(sg[i] == Catch::Approx(sh[i]).margin(1e-9));
    }
}

TEST_CASE("normalized histograms sum to one unless empty", "[stats]") {
    Rng rng(55);
    const Graph g = oracle::random_graph(15, 0.3, rng);
    CHECK(histogram_sum(degree_histogram(g, 16)) == Catch::Approx(1.0).margin(1e-12));
    CHECK(histogram_sum(clustering_histogram(g)) == Catch::Approx(1.0).margin(1e-12));
    CHECK(histogram_sum(laplacian_spectrum_histogram(g)) == Catch::Approx(1.0).margin(1e-12));
    const Graph empty = make_graph(0, {});
    CHECK(histogram_sum(degree_histogram(empty, 1)) == 0.0);
}

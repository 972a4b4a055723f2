#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "ggeval/graph.hpp"
#include "ggeval/parallel.hpp"
#include "ggeval/stats.hpp"

namespace ggeval {

enum class KernelKind { GaussianTV, GaussianL2, RBFVector };

/// Kernel over statistic vectors. GaussianTV expects normalized histograms
/// and uses total variation distance; the other two use Euclidean distance.
struct Kernel {
    KernelKind kind = KernelKind::GaussianTV;
    double sigma = 1.0;
};

inline const char* to_string(KernelKind k) {
    switch (k) {
        case KernelKind::GaussianTV: return "gaussian-tv";
        case KernelKind::GaussianL2: return "gaussian-l2";
        case KernelKind::RBFVector: return "rbf-vector";
    }
    return "?";
}

inline double kernel_eval(const Kernel& kernel, std::span<const double> x, std::span<const double> y) {
    if (kernel.sigma <= 0.0) throw ValidationError("kernel_eval: sigma must be positive");
    if (x.size() != y.size()) throw ValidationError("kernel_eval: bin misalignment");
    double d2 = 0.0;
    if (kernel.kind == KernelKind::GaussianTV) {
        double tv = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) tv += std::abs(x[i] - y[i]);
        tv *= 0.5;
        d2 = tv * tv;
    } else {
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double diff = x[i] - y[i];
            d2 += diff * diff;
        }
    }
    return std::exp(-d2 / (2.0 * kernel.sigma * kernel.sigma));
}

/// Squared maximum mean discrepancy between two sample sets:
/// E_p[k] + E_q[k] - 2 E_pq[k]. The default is the biased V-statistic with
/// the diagonal included; `biased = false` switches to the U-statistic.
inline double mmd2(const std::vector<std::vector<double>>& p_samples,
                   const std::vector<std::vector<double>>& q_samples, const Kernel& kernel, bool biased = true) {
    if (p_samples.empty() || q_samples.empty()) throw ValidationError("mmd2: empty sample set");
    const std::size_t dim = p_samples.front().size();
    for (const auto& s : p_samples)
        if (s.size() != dim) throw ValidationError("mmd2: bin misalignment inside first set");
    for (const auto& s : q_samples)
        if (s.size() != dim) throw ValidationError("mmd2: bin misalignment between sets");

    auto self_term = [&](const std::vector<std::vector<double>>& s) {
        const std::size_t m = s.size();
        double sum = 0.0;
        if (biased) {
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < m; ++j) sum += kernel_eval(kernel, s[i], s[j]);
            return sum / (static_cast<double>(m) * static_cast<double>(m));
        }
        if (m < 2) throw ValidationError("mmd2: unbiased estimate needs at least two samples per set");
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j)
                if (i != j) sum += kernel_eval(kernel, s[i], s[j]);
        return sum / (static_cast<double>(m) * static_cast<double>(m - 1));
    };

    double cross = 0.0;
    for (const auto& x : p_samples)
        for (const auto& y : q_samples) cross += kernel_eval(kernel, x, y);
    cross /= static_cast<double>(p_samples.size()) * static_cast<double>(q_samples.size());

    return self_term(p_samples) + self_term(q_samples) - 2.0 * cross;
}

struct MmdSuiteConfig {
    double sigma = 1.0;
    int clustering_bins = 100;
    int spectral_bins = 200;
    int orbit_cap = 500;
    bool orbit_four_node_only = false;
    bool biased = true;
};

struct MmdSuiteResult {
    double degree = 0.0;
    double clustering = 0.0;
    double orbit = 0.0;
    double spectral = 0.0;
    MmdSuiteConfig config;
};

/// The four kernel MMDs used throughout: degree, clustering-coefficient, and
/// Laplacian-spectrum histograms under GaussianTV, and mean 4-orbit count
/// vectors under an RBF kernel. Degree bins are aligned over both sets.
inline MmdSuiteResult mmd_suite(const GraphSet& a, const GraphSet& b, const MmdSuiteConfig& config = {}) {
    if (a.graphs.empty() || b.graphs.empty()) throw ValidationError("mmd_suite: empty graph set");
    MmdSuiteResult result;
    result.config = config;

    int max_degree = 0;
    for (const auto& g : a.graphs) max_degree = std::max(max_degree, g.max_degree());
    for (const auto& g : b.graphs) max_degree = std::max(max_degree, g.max_degree());
    const int degree_bins = max_degree + 1;

    auto stats_of = [&](const GraphSet& gs) {
        struct PerGraph {
            std::vector<double> degree, clustering, orbit, spectral;
        };
        std::vector<PerGraph> rows(gs.graphs.size());
        parallel_for(gs.graphs.size(), [&](std::size_t i) {
            const Graph& g = gs.graphs[i];
            rows[i].degree = degree_histogram(g, degree_bins).counts;
            rows[i].clustering = clustering_histogram(g, config.clustering_bins).counts;
            rows[i].orbit = mean_orbit_vector(g, config.orbit_cap, config.orbit_four_node_only);
            rows[i].spectral = laplacian_spectrum_histogram(g, config.spectral_bins).counts;
        });
        return rows;
    };
    const auto rows_a = stats_of(a);
    const auto rows_b = stats_of(b);

    auto collect = [](const auto& rows, auto member) {
        std::vector<std::vector<double>> out;
        out.reserve(rows.size());
        for (const auto& r : rows) out.push_back(r.*member);
        return out;
    };
    using Row = std::decay_t<decltype(rows_a.front())>;
    const Kernel tv{KernelKind::GaussianTV, config.sigma};
    const Kernel rbf{KernelKind::RBFVector, config.sigma};
    result.degree = mmd2(collect(rows_a, &Row::degree), collect(rows_b, &Row::degree), tv, config.biased);
    result.clustering =
        mmd2(collect(rows_a, &Row::clustering), collect(rows_b, &Row::clustering), tv, config.biased);
    result.orbit = mmd2(collect(rows_a, &Row::orbit), collect(rows_b, &Row::orbit), rbf, config.biased);
    result.spectral = mmd2(collect(rows_a, &Row::spectral), collect(rows_b, &Row::spectral), tv, config.biased);
    return result;
}

} // namespace ggeval

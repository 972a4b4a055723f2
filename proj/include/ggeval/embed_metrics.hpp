#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "ggeval/gin.hpp"
#include "ggeval/linalg.hpp"
#include "ggeval/parallel.hpp"

namespace ggeval {

/// Mean and sample covariance (1/(N-1)) fitted to embedding rows.
struct GaussianSummary {
    std::vector<double> mean;
    Matrix covariance;
};

inline GaussianSummary gaussian_summary(const EmbeddingMatrix& e) {
    const std::size_t n = e.rows.size();
    const int d = e.dim;
    if (n < 2) throw ValidationError("gaussian_summary: need at least two samples");
    GaussianSummary s;
    s.mean.assign(static_cast<std::size_t>(d), 0.0);
    for (const auto& row : e.rows)
        for (int j = 0; j < d; ++j) s.mean[static_cast<std::size_t>(j)] += row[static_cast<std::size_t>(j)];
    for (double& m : s.mean) m /= static_cast<double>(n);
    s.covariance = Matrix(d, d);
    std::vector<double> centered(static_cast<std::size_t>(d));
    for (const auto& row : e.rows) {
        for (int j = 0; j < d; ++j)
            centered[static_cast<std::size_t>(j)] = row[static_cast<std::size_t>(j)] - s.mean[static_cast<std::size_t>(j)];
        for (int i = 0; i < d; ++i) {
            const double ci = centered[static_cast<std::size_t>(i)];
            if (ci == 0.0) continue;
            for (int j = i; j < d; ++j) s.covariance(i, j) += ci * centered[static_cast<std::size_t>(j)];
        }
    }
    const double scale = 1.0 / static_cast<double>(n - 1);
    for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) {
            s.covariance(i, j) *= scale;
            s.covariance(j, i) = s.covariance(i, j);
        }
    return s;
}

struct FrechetResult {
    double raw = 0.0;     // may be slightly negative from cancellation
    double clamped = 0.0; // max(raw, 0)
};

namespace detail {

// Symmetric square root in extended precision. When the smallest eigenvalue
// falls below 1e-10 the spectrum is shifted by 1e-6 * tr / d first; the trace
// after shifting/clamping is returned through trace_out so both the root and
// the trace terms of the distance see the same regularization.
inline MatrixT<long double> regularized_sqrt(const Matrix& c, long double& trace_out) {
    const int d = c.rows;
    MatrixT<long double> work(d, d);
    for (std::size_t i = 0; i < c.a.size(); ++i) work.a[i] = static_cast<long double>(c.a[i]);
    auto eig = symmetric_eigen(std::move(work));
    long double tr = 0.0L;
    long double min_eig = eig.values.empty() ? 0.0L : eig.values.front();
    for (long double v : eig.values) tr += v;
    if (min_eig < 1e-10L) {
        const long double shift = 1e-6L * tr / d;
        for (long double& v : eig.values) v += shift;
    }
    trace_out = 0.0L;
    MatrixT<long double> root(d, d);
    for (int j = 0; j < d; ++j) {
        const long double lambda = eig.values[static_cast<std::size_t>(j)] > 0.0L
                                       ? eig.values[static_cast<std::size_t>(j)]
                                       : 0.0L;
        trace_out += lambda;
        const long double sl = std::sqrt(lambda);
        if (sl == 0.0L) continue;
        for (int i = 0; i < d; ++i) {
            const long double vij = eig.vectors(i, j) * sl;
            if (vij == 0.0L) continue;
            for (int k = i; k < d; ++k) root(i, k) += vij * eig.vectors(k, j);
        }
    }
    for (int i = 0; i < d; ++i)
        for (int k = 0; k < i; ++k) root(i, k) = root(k, i);
    return root;
}

} // namespace detail

/// Frechet distance between two Gaussian summaries:
///   ||m_a - m_b||^2 + Tr(C_a + C_b - 2 (C_a^{1/2} C_b C_a^{1/2})^{1/2}).
/// The cross trace equals the nuclear norm of C_a^{1/2} C_b^{1/2}, computed
/// from the symmetric eigenproblem of [[0, X], [X^T, 0]] so small eigenvalues
/// are never squared. Internals run in extended precision.
inline FrechetResult frechet_distance(const GaussianSummary& a, const GaussianSummary& b) {
    const int d = a.covariance.rows;
    if (b.covariance.rows != d || a.mean.size() != b.mean.size())
        throw ValidationError("frechet_distance: dimension mismatch");
    long double mean_term = 0.0L;
    for (std::size_t i = 0; i < a.mean.size(); ++i) {
        const long double diff = static_cast<long double>(a.mean[i]) - static_cast<long double>(b.mean[i]);
        mean_term += diff * diff;
    }
    long double trace_a = 0.0L, trace_b = 0.0L;
    const auto root_a = detail::regularized_sqrt(a.covariance, trace_a);
    const auto root_b = detail::regularized_sqrt(b.covariance, trace_b);
    const auto cross = matmul(root_a, root_b);
    MatrixT<long double> augmented(2 * d, 2 * d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            augmented(i, d + j) = cross(i, j);
            augmented(d + j, i) = cross(i, j);
        }
    const auto eig = symmetric_eigen(std::move(augmented));
    long double nuclear = 0.0L; // spectrum is symmetric +-sigma_i
    for (long double v : eig.values)
        if (v > 0.0L) nuclear += v;
    FrechetResult r;
    r.raw = static_cast<double>(mean_term + trace_a + trace_b - 2.0L * nuclear);
    r.clamped = std::max(r.raw, 0.0);
    return r;
}

/// Union-of-balls manifold support: per-point distance to the k-th nearest
/// other point of the same set.
struct ManifoldIndex {
    std::vector<std::vector<double>> points;
    int k = 0;
    std::vector<double> radii;
};

namespace detail {

inline double euclidean(const std::vector<double>& x, const std::vector<double>& y) {
    double d2 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double diff = x[i] - y[i];
        d2 += diff * diff;
    }
    return std::sqrt(d2);
}

} // namespace detail

inline ManifoldIndex build_manifold(const EmbeddingMatrix& e, int k) {
    const std::size_t n = e.rows.size();
    if (k < 1) throw ValidationError("build_manifold: k must be >= 1");
    if (n <= static_cast<std::size_t>(k))
        throw ValidationError("build_manifold: need more than k=" + std::to_string(k) + " points, got " +
                              std::to_string(n));
    ManifoldIndex index;
    index.points = e.rows;
    index.k = k;
    index.radii.resize(n);
    parallel_for(n, [&](std::size_t i) {
        std::vector<double> dist;
        dist.reserve(n - 1);
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) dist.push_back(detail::euclidean(index.points[i], index.points[j]));
        std::nth_element(dist.begin(), dist.begin() + (k - 1), dist.end());
        index.radii[i] = dist[static_cast<std::size_t>(k - 1)];
    });
    return index;
}

struct PrdcResult {
    double precision = 0.0;
    double recall = 0.0;
    double density = 0.0;
    double coverage = 0.0;
};

/// Manifold precision/recall and density/coverage between embedding sets.
/// Ball membership is boundary-inclusive (distance <= radius).
inline PrdcResult prdc(const EmbeddingMatrix& real, const EmbeddingMatrix& gen, int k) {
    if (real.dim != gen.dim) throw ValidationError("prdc: embedding dimension mismatch");
    const auto real_manifold = build_manifold(real, k);
    const auto gen_manifold = build_manifold(gen, k);
    const std::size_t n_real = real.rows.size();
    const std::size_t n_gen = gen.rows.size();

    std::vector<std::int64_t> real_balls_hit_by(n_gen, 0); // per generated point
    std::vector<std::uint8_t> real_ball_covered(n_real, 0);
    std::vector<std::uint8_t> real_in_gen_manifold(n_real, 0);
    parallel_for(n_gen, [&](std::size_t j) {
        for (std::size_t i = 0; i < n_real; ++i)
            if (detail::euclidean(gen.rows[j], real.rows[i]) <= real_manifold.radii[i]) ++real_balls_hit_by[j];
    });
    parallel_for(n_real, [&](std::size_t i) {
        for (std::size_t j = 0; j < n_gen; ++j) {
            const double d = detail::euclidean(real.rows[i], gen.rows[j]);
            if (d <= real_manifold.radii[i]) real_ball_covered[i] = 1;
            if (d <= gen_manifold.radii[j]) real_in_gen_manifold[i] = 1;
        }
    });

    PrdcResult r;
    std::int64_t in_real_manifold = 0, ball_memberships = 0;
    for (std::size_t j = 0; j < n_gen; ++j) {
        if (real_balls_hit_by[j] > 0) ++in_real_manifold;
        ball_memberships += real_balls_hit_by[j];
    }
    std::int64_t covered = 0, recalled = 0;
    for (std::size_t i = 0; i < n_real; ++i) {
        covered += real_ball_covered[i];
        recalled += real_in_gen_manifold[i];
    }
    r.precision = static_cast<double>(in_real_manifold) / static_cast<double>(n_gen);
    r.recall = static_cast<double>(recalled) / static_cast<double>(n_real);
    r.density = static_cast<double>(ball_memberships) / (static_cast<double>(k) * static_cast<double>(n_gen));
    r.coverage = static_cast<double>(covered) / static_cast<double>(n_real);
    return r;
}

/// Harmonic mean, defined as 0 when both inputs are 0. Inputs need only be
/// non-negative: the density/coverage pair feeds values above 1 here.
inline double f1(double p, double r) {
    if (p < 0.0 || r < 0.0) throw ValidationError("f1: arguments must be non-negative");
    const double denom = p + r;
    if (denom == 0.0) return 0.0;
    return 2.0 * p * r / denom;
}

} // namespace ggeval

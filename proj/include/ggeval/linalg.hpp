#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "ggeval/errors.hpp"

namespace ggeval {

/// Dense row-major matrix of scalar T.
template <typename T>
struct MatrixT {
    int rows = 0;
    int cols = 0;
    std::vector<T> a;

    MatrixT() = default;
    MatrixT(int r, int c, T fill = T(0)) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, fill) {}

    T& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
    const T& operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * cols + j]; }
};

using Matrix = MatrixT<double>;

template <typename T>
MatrixT<T> matmul(const MatrixT<T>& x, const MatrixT<T>& y) {
    if (x.cols != y.rows) throw ValidationError("matmul: dimension mismatch");
    MatrixT<T> out(x.rows, y.cols);
    for (int i = 0; i < x.rows; ++i)
        for (int k = 0; k < x.cols; ++k) {
            const T xik = x(i, k);
            if (xik == T(0)) continue;
            for (int j = 0; j < y.cols; ++j) out(i, j) += xik * y(k, j);
        }
    return out;
}

template <typename T>
T trace(const MatrixT<T>& x) {
    T t(0);
    for (int i = 0; i < x.rows && i < x.cols; ++i) t += x(i, i);
    return t;
}

namespace detail {

template <typename T>
T pythag(T a, T b) {
    a = std::abs(a);
    b = std::abs(b);
    if (a < b) std::swap(a, b);
    if (a == T(0)) return T(0);
    const T r = b / a;
    return a * std::sqrt(T(1) + r * r);
}

// Householder reduction of a symmetric matrix to tridiagonal form with
// accumulation of the orthogonal transform (tred2 lineage). On return z holds
// the transform, d the diagonal and e the subdiagonal (e[0] unused).
template <typename T>
void tridiagonalize(MatrixT<T>& z, std::vector<T>& d, std::vector<T>& e) {
    const int n = z.rows;
    d.assign(static_cast<std::size_t>(n), T(0));
    e.assign(static_cast<std::size_t>(n), T(0));
    for (int i = n - 1; i >= 1; --i) {
        const int l = i - 1;
        T h(0), scale(0);
        if (l > 0) {
            for (int k = 0; k <= l; ++k) scale += std::abs(z(i, k));
            if (scale == T(0)) {
                e[i] = z(i, l);
            } else {
                for (int k = 0; k <= l; ++k) {
                    z(i, k) /= scale;
                    h += z(i, k) * z(i, k);
                }
                T f = z(i, l);
                T g = f >= T(0) ? -std::sqrt(h) : std::sqrt(h);
                e[i] = scale * g;
                h -= f * g;
                z(i, l) = f - g;
                f = T(0);
                for (int j = 0; j <= l; ++j) {
                    z(j, i) = z(i, j) / h;
                    g = T(0);
                    for (int k = 0; k <= j; ++k) g += z(j, k) * z(i, k);
                    for (int k = j + 1; k <= l; ++k) g += z(k, j) * z(i, k);
                    e[j] = g / h;
                    f += e[j] * z(i, j);
                }
                const T hh = f / (h + h);
                for (int j = 0; j <= l; ++j) {
                    f = z(i, j);
                    e[j] = g = e[j] - hh * f;
                    for (int k = 0; k <= j; ++k) z(j, k) -= f * e[k] + g * z(i, k);
                }
            }
        } else {
            e[i] = z(i, l);
        }
        d[i] = h;
    }
    d[0] = T(0);
    e[0] = T(0);
    for (int i = 0; i < n; ++i) {
        if (d[i] != T(0)) {
            for (int j = 0; j < i; ++j) {
                T g(0);
                for (int k = 0; k < i; ++k) g += z(i, k) * z(k, j);
                for (int k = 0; k < i; ++k) z(k, j) -= g * z(k, i);
            }
        }
        d[i] = z(i, i);
        z(i, i) = T(1);
        for (int j = 0; j < i; ++j) z(j, i) = z(i, j) = T(0);
    }
}

// Implicit-shift QL sweep on a symmetric tridiagonal matrix, rotations
// accumulated into z (tql2 lineage). Total rotation budget is 10*n.
template <typename T>
void ql_implicit(MatrixT<T>& z, std::vector<T>& d, std::vector<T>& e) {
    const int n = z.rows;
    if (n == 0) return;
    const T eps = std::numeric_limits<T>::epsilon();
    for (int i = 1; i < n; ++i) e[i - 1] = e[i];
    e[n - 1] = T(0);
    const int budget = std::max(30, 10 * n);
    int iterations = 0;
    for (int l = 0; l < n; ++l) {
        for (;;) {
            int m = l;
            while (m < n - 1) {
                const T dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= eps * dd) break;
                ++m;
            }
            if (m == l) break;
            if (++iterations > budget)
                throw NumericalError("symmetric_eigen: QL failed to converge within " + std::to_string(budget) +
                                     " iterations");
            T g = (d[l + 1] - d[l]) / (T(2) * e[l]);
            T r = pythag(g, T(1));
            g = d[m] - d[l] + e[l] / (g + (g >= T(0) ? std::abs(r) : -std::abs(r)));
            T s(1), c(1), p(0);
            bool underflow = false;
            for (int i = m - 1; i >= l; --i) {
                T f = s * e[i];
                const T b = c * e[i];
                r = pythag(f, g);
                e[i + 1] = r;
                if (r == T(0)) {
                    d[i + 1] -= p;
                    e[m] = T(0);
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + T(2) * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for (int k = 0; k < n; ++k) {
                    f = z(k, i + 1);
                    z(k, i + 1) = s * z(k, i) + c * f;
                    z(k, i) = c * z(k, i) - s * f;
                }
            }
            if (underflow) continue;
            d[l] -= p;
            e[l] = g;
            e[m] = T(0);
        }
    }
}

} // namespace detail

/// Eigendecomposition of a symmetric matrix: A = V diag(values) V^T.
template <typename T>
struct SymEigResult {
    std::vector<T> values; // ascending
    MatrixT<T> vectors;    // column j pairs with values[j]
};

template <typename T>
SymEigResult<T> symmetric_eigen(MatrixT<T> a) {
    if (a.rows != a.cols) throw ValidationError("symmetric_eigen: matrix not square");
    const int n = a.rows;
    std::vector<T> d, e;
    detail::tridiagonalize(a, d, e);
    detail::ql_implicit(a, d, e);
    // sort ascending, carrying the eigenvector columns along
    std::vector<int> idx(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](int x, int y) { return d[x] < d[y]; });
    SymEigResult<T> result;
    result.values.resize(static_cast<std::size_t>(n));
    result.vectors = MatrixT<T>(n, n);
    for (int j = 0; j < n; ++j) {
        result.values[j] = d[idx[j]];
        for (int i = 0; i < n; ++i) result.vectors(i, j) = a(i, idx[j]);
    }
    return result;
}

/// Symmetric square root of a PSD matrix; negative eigenvalues are clamped
/// to zero before the root.
template <typename T>
MatrixT<T> sqrt_psd(const MatrixT<T>& a) {
    auto eig = symmetric_eigen(a);
    const int n = a.rows;
    MatrixT<T> out(n, n);
    for (int j = 0; j < n; ++j) {
        const T lambda = eig.values[j] > T(0) ? std::sqrt(eig.values[j]) : T(0);
        if (lambda == T(0)) continue;
        for (int i = 0; i < n; ++i) {
            const T vij = eig.vectors(i, j) * lambda;
            if (vij == T(0)) continue;
            for (int k = i; k < n; ++k) out(i, k) += vij * eig.vectors(k, j);
        }
    }
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < i; ++k) out(i, k) = out(k, i);
    return out;
}

} // namespace ggeval

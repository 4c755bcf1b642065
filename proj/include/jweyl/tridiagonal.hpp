#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "jweyl/errors.hpp"

namespace jweyl {

/// Eigen-decomposition of a real symmetric tridiagonal matrix, ascending order.
struct TridiagonalEigen {
    std::vector<double> values;
    /// vectors[k] is the unit eigenvector of values[k]; empty unless requested.
    std::vector<std::vector<double>> vectors;
};

/**
 * Implicit QL iteration with Wilkinson-type shifts (EISPACK tql2 family).
 * `diag` has n entries, `off` has n-1 entries (off[i] couples i and i+1).
 * Eigenvectors are sign-normalized so that their first nonzero entry is positive.
 */
inline TridiagonalEigen symmetric_tridiagonal_eigen(std::span<const double> diag, std::span<const double> off,
                                                    bool want_vectors, int max_iterations = 60) {
    const int n = static_cast<int>(diag.size());
    if (n == 0) return {};
    if (static_cast<int>(off.size()) != n - 1) throw DomainError("tridiagonal: off-diagonal length must be n-1");

    std::vector<double> d(diag.begin(), diag.end());
    std::vector<double> e(static_cast<std::size_t>(n), 0.0);
    std::copy(off.begin(), off.end(), e.begin());

    // z[k][i]: component k of eigenvector i
    std::vector<std::vector<double>> z;
    if (want_vectors) {
        z.assign(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n), 0.0));
        for (int k = 0; k < n; ++k) z[k][k] = 1.0;
    }

    constexpr double eps = std::numeric_limits<double>::epsilon();
    for (int l = 0; l < n; ++l) {
        int iter = 0;
        int m = l;
        do {
            for (m = l; m < n - 1; ++m) {
                const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= eps * dd) break;
            }
            if (m != l) {
                if (iter++ == max_iterations)
                    throw ConvergenceError("tridiagonal eigensolver did not converge for eigenvalue " + std::to_string(l),
                                           l);
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = std::hypot(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
                double s = 1.0, c = 1.0, p = 0.0;
                int i = m - 1;
                for (; i >= l; --i) {
                    double f = s * e[i];
                    const double b = c * e[i];
                    r = std::hypot(f, g);
                    e[i + 1] = r;
                    if (r == 0.0) {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                    if (want_vectors) {
                        for (int k = 0; k < n; ++k) {
                            f = z[k][i + 1];
                            z[k][i + 1] = s * z[k][i] + c * f;
                            z[k][i] = c * z[k][i] - s * f;
                        }
                    }
                }
                if (r == 0.0 && i >= l) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }

    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return d[x] < d[y]; });

    TridiagonalEigen out;
    out.values.reserve(static_cast<std::size_t>(n));
    for (int k : order) out.values.push_back(d[k]);
    if (want_vectors) {
        out.vectors.reserve(static_cast<std::size_t>(n));
        for (int k : order) {
            std::vector<double> v(static_cast<std::size_t>(n));
            for (int r = 0; r < n; ++r) v[r] = z[r][k];
            const auto first = std::find_if(v.begin(), v.end(), [](double x) { return std::abs(x) > 1e-300; });
            if (first != v.end() && *first < 0.0)
                for (auto& x : v) x = -x;
            out.vectors.push_back(std::move(v));
        }
    }
    return out;
}

/**
 * Solves the tridiagonal system (sub, diag, sup) x = rhs by Gaussian elimination
 * with partial pivoting (LAPACK gtsv scheme). Exactly singular pivots are
 * replaced by a tiny multiple of the matrix scale, which is what inverse
 * iteration wants.
 */
template <typename T>
std::vector<T> solve_tridiagonal(std::vector<T> sub, std::vector<T> diag, std::vector<T> sup, std::vector<T> rhs) {
    const std::size_t n = diag.size();
    if (n == 0) return {};
    if (sub.size() + 1 != n || sup.size() + 1 != n || rhs.size() != n)
        throw DomainError("tridiagonal solve: inconsistent sizes");
    double scale = 0.0;
    for (const auto& x : diag) scale = std::max(scale, static_cast<double>(std::abs(x)));
    for (const auto& x : sub) scale = std::max(scale, static_cast<double>(std::abs(x)));
    const double tiny = std::max(scale, 1.0) * std::numeric_limits<double>::epsilon() * 1e-3;

    std::vector<T> fill(n > 2 ? n - 2 : 0, T{0});
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (std::abs(diag[i]) >= std::abs(sub[i])) {
            if (diag[i] == T{0}) diag[i] = T{tiny};
            const T fact = sub[i] / diag[i];
            diag[i + 1] -= fact * sup[i];
            rhs[i + 1] -= fact * rhs[i];
            if (i + 2 < n) fill[i] = T{0};
        } else {
            const T fact = diag[i] / sub[i];
            diag[i] = sub[i];
            const T temp = diag[i + 1];
            diag[i + 1] = sup[i] - fact * temp;
            if (i + 2 < n) {
                fill[i] = sup[i + 1];
                sup[i + 1] = -fact * fill[i];
            }
            sup[i] = temp;
            const T tb = rhs[i];
            rhs[i] = rhs[i + 1];
            rhs[i + 1] = tb - fact * rhs[i + 1];
        }
    }
    if (diag[n - 1] == T{0}) diag[n - 1] = T{tiny};
    rhs[n - 1] /= diag[n - 1];
    if (n > 1) rhs[n - 2] = (rhs[n - 2] - sup[n - 2] * rhs[n - 1]) / diag[n - 2];
    for (std::size_t k = n; k-- > 2;) {
        const std::size_t i = k - 2;
        rhs[i] = (rhs[i] - sup[i] * rhs[i + 1] - fill[i] * rhs[i + 2]) / diag[i];
    }
    return rhs;
}

/// ||T v - lambda v|| for the symmetric tridiagonal T = (off, diag, off).
inline double tridiagonal_residual(std::span<const double> diag, std::span<const double> off, double lambda,
                                   std::span<const double> v) {
    const std::size_t n = diag.size();
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double r = (diag[i] - lambda) * v[i];
        if (i > 0) r += off[i - 1] * v[i - 1];
        if (i + 1 < n) r += off[i] * v[i + 1];
        acc += r * r;
    }
    return std::sqrt(acc);
}

/// Unit eigenvector approximation for an accurate eigenvalue, by two steps of inverse iteration.
inline std::vector<double> inverse_iteration(std::span<const double> diag, std::span<const double> off, double lambda) {
    const std::size_t n = diag.size();
    const double shift = lambda + 1e-13 * (1.0 + std::abs(lambda));
    std::vector<double> x(n, 1.0);
    for (std::size_t i = 0; i < n; ++i) x[i] = 1.0 + 0.01 * static_cast<double>(i % 7);
    for (int step = 0; step < 3; ++step) {
        std::vector<double> dg(diag.begin(), diag.end());
        for (auto& v : dg) v -= shift;
        std::vector<double> lo(off.begin(), off.end());
        x = solve_tridiagonal(lo, std::move(dg), std::vector<double>(off.begin(), off.end()), std::move(x));
        double nrm = 0.0;
        for (double v : x) nrm += v * v;
        nrm = std::sqrt(nrm);
        if (!(nrm > 0.0) || !std::isfinite(nrm)) break;
        for (auto& v : x) v /= nrm;
    }
    return x;
}

} // namespace jweyl

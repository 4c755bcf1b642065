#pragma once

// Independent reference computations for the unit tests. Nothing here calls
// into the library's solvers.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "jweyl/coefficients.hpp"

namespace oracle {

using cplx = std::complex<double>;
using Matrix = std::vector<std::vector<double>>;

/// Interior matrix of a window, built directly from a(n), b(n).
inline Matrix dense_window(const jweyl::CoefficientModel& c, const jweyl::LatticeWindow& w) {
    const std::size_t N = w.interior_size();
    Matrix m(N, std::vector<double>(N, 0.0));
    for (std::size_t i = 0; i < N; ++i) {
        const jweyl::Index n = w.first_interior() + static_cast<jweyl::Index>(i);
        m[i][i] = c.b(n);
        if (i + 1 < N) m[i][i + 1] = m[i + 1][i] = c.a(n);
    }
    return m;
}

/// Number of eigenvalues below x (Sturm sequence of the LDL^T pivots).
inline std::size_t sturm_count(const std::vector<double>& d, const std::vector<double>& e, double x) {
    std::size_t count = 0;
    double q = 1.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const double e2 = i == 0 ? 0.0 : e[i - 1] * e[i - 1];
        q = d[i] - x - (i == 0 ? 0.0 : e2 / q);
        if (q == 0.0) q = -1e-300;
        if (q < 0.0) ++count;
    }
    return count;
}

/// Eigenvalues of a symmetric tridiagonal matrix by bisection on the Sturm count.
inline std::vector<double> sturm_eigenvalues(const std::vector<double>& d, const std::vector<double>& e) {
    double lo = 0.0, hi = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        double r = 0.0;
        if (i > 0) r += std::abs(e[i - 1]);
        if (i < e.size()) r += std::abs(e[i]);
        lo = std::min(lo, d[i] - r);
        hi = std::max(hi, d[i] + r);
    }
    lo -= 1.0;
    hi += 1.0;
    std::vector<double> out;
    for (std::size_t k = 0; k < d.size(); ++k) {
        double a = lo, b = hi;
        for (int it = 0; it < 200 && b - a > 0.0; ++it) {
            const double m = 0.5 * (a + b);
            if (m == a || m == b) break;
            (sturm_count(d, e, m) > k ? b : a) = m;
        }
        out.push_back(0.5 * (a + b));
    }
    return out;
}

inline std::vector<double> sturm_eigenvalues(const jweyl::CoefficientModel& c, const jweyl::LatticeWindow& w) {
    std::vector<double> d, e;
    for (jweyl::Index n = w.first_interior(); n <= w.last_interior(); ++n) {
        d.push_back(c.b(n));
        if (n < w.last_interior()) e.push_back(c.a(n));
    }
    return sturm_eigenvalues(d, e);
}

struct DenseEigen {
    std::vector<double> values;
    /// vectors[k] belongs to values[k], unit length
    Matrix vectors;
};

/// Cyclic Jacobi rotations on a dense symmetric matrix; ascending output.
inline DenseEigen jacobi_eigen(Matrix a) {
    const std::size_t n = a.size();
    Matrix v(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) v[i][i] = 1.0;
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
        if (off < 1e-40) break;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                if (a[p][q] == 0.0) continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a[k][p], akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a[p][k], aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v[k][p], vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
    }
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a[i][i] < a[j][j]; });
    DenseEigen out;
    for (std::size_t k : order) {
        out.values.push_back(a[k][k]);
        std::vector<double> col(n);
        for (std::size_t i = 0; i < n; ++i) col[i] = v[i][k];
        out.vectors.push_back(std::move(col));
    }
    return out;
}

/// Solves A x = rhs for a dense complex matrix (partial pivoting).
inline std::vector<cplx> complex_solve(std::vector<std::vector<cplx>> A, std::vector<cplx> rhs) {
    const std::size_t n = A.size();
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(A[i][k]) > std::abs(A[piv][k])) piv = i;
        std::swap(A[k], A[piv]);
        std::swap(rhs[k], rhs[piv]);
        if (std::abs(A[k][k]) == 0.0) throw std::runtime_error("singular matrix");
        for (std::size_t i = k + 1; i < n; ++i) {
            const cplx f = A[i][k] / A[k][k];
            for (std::size_t j = k; j < n; ++j) A[i][j] -= f * A[k][j];
            rhs[i] -= f * rhs[k];
        }
    }
    std::vector<cplx> x(n);
    for (std::size_t i = n; i-- > 0;) {
        cplx s = rhs[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= A[i][j] * x[j];
        x[i] = s / A[i][i];
    }
    return x;
}

/// Column m of (H - z)^{-1} for the interior matrix of a window (index relative to first interior site).
inline std::vector<cplx> resolvent_column(const jweyl::CoefficientModel& c, const jweyl::LatticeWindow& w, cplx z,
                                          std::size_t m) {
    const Matrix H = dense_window(c, w);
    const std::size_t N = H.size();
    std::vector<std::vector<cplx>> A(N, std::vector<cplx>(N));
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) A[i][j] = H[i][j] - (i == j ? z : cplx(0.0));
    std::vector<cplx> e(N, cplx(0.0));
    e[m] = 1.0;
    return complex_solve(std::move(A), std::move(e));
}

/// Random table model on [0, N+1], a in [0.5, 2], b in [-1, 1].
struct RandomWindow {
    jweyl::CoefficientModel model;
    jweyl::LatticeWindow window;
};

inline RandomWindow random_window(std::mt19937_64& rng, long min_sites, long max_sites, double a_lo = 0.5,
                                  double a_hi = 2.0, double b_lo = -1.0, double b_hi = 1.0) {
    std::uniform_int_distribution<long> size(min_sites, max_sites);
    std::uniform_real_distribution<double> ua(a_lo, a_hi), ub(b_lo, b_hi);
    const long N = size(rng);
    std::vector<double> a(static_cast<std::size_t>(N + 2)), b(static_cast<std::size_t>(N + 2));
    for (auto& x : a) x = ua(rng);
    for (auto& x : b) x = ub(rng);
    return {jweyl::CoefficientModel::table(0, std::move(a), std::move(b)), jweyl::LatticeWindow(0, N + 1)};
}

inline cplx random_z(std::mt19937_64& rng, double re = 2.0, double im_lo = 0.2, double im_hi = 2.0) {
    std::uniform_real_distribution<double> ux(-re, re), uy(im_lo, im_hi);
    return {ux(rng), uy(rng)};
}

} // namespace oracle

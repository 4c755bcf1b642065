#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <queue>
#include <type_traits>
#include <vector>

namespace jweyl {

template <typename T>
struct QuadResult {
    T value{};
    double error = 0.0;
    int intervals = 0;
    bool converged = false;
};

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule on [-1, 1].
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851, 0.864864423359769072789712788640926,
    0.741531185599394439863864773280788, 0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204, 0.104790010322250183839876322541518,
    0.140653259715525918745189590510238, 0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the odd Kronrod nodes 1, 3, 5, 7.
inline constexpr std::array<double, 4> kGaussWeights = {0.129484966168869693270611432679082,
                                                       0.279705391489276667901467771423780,
                                                       0.381830050505118944950369775488975,
                                                       0.417959183673469387755102040816327};

template <typename T>
struct Panel {
    double a, b;
    T value;
    double error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

template <typename T, typename F>
Panel<T> gauss_kronrod_15(const F& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const T fc = f(c);
    T kronrod = fc * kKronrodWeights[7];
    T gauss = fc * kGaussWeights[3];
    for (int i = 0; i < 7; ++i) {
        const double dx = h * kKronrodNodes[i];
        const T pair = f(c - dx) + f(c + dx);
        kronrod += pair * kKronrodWeights[i];
        if (i % 2 == 1) gauss += pair * kGaussWeights[i / 2];
    }
    return {a, b, kronrod * h, std::abs(kronrod - gauss) * std::abs(h)};
}

} // namespace detail

/**
 * Globally adaptive Gauss-Kronrod (7/15) quadrature on [a, b]: the panel with the
 * largest error estimate is bisected until the summed estimate drops below
 * max(abs_tol, rel_tol * |I|) or `max_panels` is reached.
 */
template <typename F>
auto integrate(const F& f, double a, double b, double abs_tol = 1e-13, double rel_tol = 1e-12, int max_panels = 4000) {
    using T = std::decay_t<decltype(f(a))>;
    QuadResult<T> out;
    if (a == b) {
        out.converged = true;
        return out;
    }
    std::priority_queue<detail::Panel<T>> heap;
    heap.push(detail::gauss_kronrod_15<T>(f, a, b));
    T total = heap.top().value;
    double err = heap.top().error;
    while (err > std::max(abs_tol, rel_tol * std::abs(total)) && static_cast<int>(heap.size()) < max_panels) {
        const auto worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            heap.push(worst);
            break;
        }
        auto left = detail::gauss_kronrod_15<T>(f, worst.a, mid);
        auto right = detail::gauss_kronrod_15<T>(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
    // Re-sum to shed the drift of the incremental updates.
    out.value = T{};
    out.error = 0.0;
    out.intervals = static_cast<int>(heap.size());
    while (!heap.empty()) {
        out.value += heap.top().value;
        out.error += heap.top().error;
        heap.pop();
    }
    out.converged = out.error <= std::max(abs_tol, rel_tol * std::abs(out.value));
    return out;
}

/// Integral over [a, b] with extra breakpoints; points outside (a, b) are ignored.
template <typename F>
auto integrate_with_breaks(const F& f, double a, double b, std::vector<double> breaks, double abs_tol = 1e-13,
                           double rel_tol = 1e-12) {
    using T = std::decay_t<decltype(f(a))>;
    std::vector<double> pts{a};
    std::sort(breaks.begin(), breaks.end());
    for (double x : breaks)
        if (x > pts.back() && x < b) pts.push_back(x);
    pts.push_back(b);
    QuadResult<T> out;
    out.converged = true;
    const double share = abs_tol / static_cast<double>(pts.size() - 1);
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        auto r = integrate(f, pts[i], pts[i + 1], share, rel_tol);
        out.value += r.value;
        out.error += r.error;
        out.intervals += r.intervals;
        out.converged = out.converged && r.converged;
    }
    return out;
}

/**
 * Integral over the real line. [-scale, scale] is integrated directly; the two
 * tails are mapped to (0, 1] by lambda = +-scale / s, which turns an integrand
 * decaying like |lambda|^-2 into a bounded one.
 */
template <typename F>
auto integrate_real_line(const F& f, double scale, std::vector<double> breaks = {}, double abs_tol = 1e-13,
                         double rel_tol = 1e-12) {
    using T = std::decay_t<decltype(f(0.0))>;
    auto core = integrate_with_breaks(f, -scale, scale, std::move(breaks), abs_tol, rel_tol);
    auto tail = [&](double s) -> T {
        const double x = scale / s;
        return (f(x) + f(-x)) * (scale / (s * s));
    };
    auto tails = integrate(tail, 0.0, 1.0, abs_tol, rel_tol);
    QuadResult<T> out;
    out.value = core.value + tails.value;
    out.error = core.error + tails.error;
    out.intervals = core.intervals + tails.intervals;
    out.converged = core.converged && tails.converged;
    return out;
}

} // namespace jweyl

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <concepts>
#include <span>
#include <string>
#include <vector>

#include "jweyl/coefficients.hpp"
#include "jweyl/errors.hpp"
#include "jweyl/polynomial.hpp"

namespace jweyl {

/**
 * Values of a solution of tau u = z u on every site of a window (endpoints included).
 *
 * The stored values may carry a common scale: the true solution is
 * exp(log_scale()) * (*this)(n). Ratios and zero tests are scale free.
 */
class SolutionSample {
public:
    SolutionSample(cplx z, LatticeWindow window, std::vector<cplx> values, double log_scale = 0.0)
        : z_(z), window_(window), values_(std::move(values)), log_scale_(log_scale) {
        if (values_.size() != window_.size())
            throw DomainError("solution sample length does not match its window");
    }

    cplx z() const noexcept { return z_; }
    const LatticeWindow& window() const noexcept { return window_; }
    double log_scale() const noexcept { return log_scale_; }
    std::span<const cplx> values() const noexcept { return values_; }

    cplx operator()(Index n) const {
        if (!window_.contains(n))
            throw DomainError("site " + std::to_string(n) + " outside the solution window");
        return values_[static_cast<std::size_t>(n - window_.left())];
    }

    /// Values on the interior sites only.
    std::vector<cplx> interior() const {
        return {values_.begin() + 1, values_.end() - 1};
    }

    SolutionSample scaled(cplx factor) const {
        std::vector<cplx> v(values_);
        for (auto& x : v) x *= factor;
        return {z_, window_, std::move(v), log_scale_};
    }

private:
    cplx z_;
    LatticeWindow window_;
    std::vector<cplx> values_;
    double log_scale_;
};

template <typename F>
concept LatticeSequence = requires(const F& f, Index n) {
    { f(n) } -> std::convertible_to<cplx>;
};

/// (tau f)(n) = a(n) f(n+1) + a(n-1) f(n-1) + b(n) f(n)
template <LatticeSequence F>
cplx apply_tau(const CoefficientModel& c, const F& f, Index n) {
    return c.a(n) * cplx(f(n + 1)) + c.a(n - 1) * cplx(f(n - 1)) + c.b(n) * cplx(f(n));
}

/// Modified Wronskian W(f,g)(n) = a(n) (f(n) g(n+1) - f(n+1) g(n)).
template <LatticeSequence F, LatticeSequence G>
cplx wronskian(const CoefficientModel& c, const F& f, const G& g, Index n) {
    return c.a(n) * (cplx(f(n)) * cplx(g(n + 1)) - cplx(f(n + 1)) * cplx(g(n)));
}

/// Per-step renormalization threshold used by solve_recurrence.
inline constexpr double kRenormalizeAbove = 1e150;

/**
 * Solution of tau u = z u on `window` with prescribed u(n0), u(n0+1),
 * propagated forward to window.right() and backward to window.left().
 *
 * With `renormalize`, values are rescaled whenever they exceed 1e150 and the
 * scale is accumulated in log_scale(); entries far below the final scale may
 * underflow to zero.
 */
inline SolutionSample solve_recurrence(const CoefficientModel& c, cplx z, Index n0, cplx u0, cplx u1,
                                       const LatticeWindow& window, bool renormalize = true) {
    if (!window.contains(n0) || !window.contains(n0 + 1))
        throw DomainError("initial sites n0, n0+1 must lie in the window");
    c.require_window(window);

    const Index L = window.left();
    std::vector<cplx> u(window.size(), cplx{});
    auto at = [&](Index n) -> cplx& { return u[static_cast<std::size_t>(n - L)]; };
    at(n0) = u0;
    at(n0 + 1) = u1;
    double log_scale = 0.0;

    auto rescale_if_needed = [&](cplx v) {
        if (renormalize && std::abs(v) > kRenormalizeAbove) {
            const double s = 1.0 / kRenormalizeAbove;
            for (auto& x : u) x *= s;
            log_scale += std::log(kRenormalizeAbove);
        }
    };

    for (Index n = n0 + 1; n < window.right(); ++n) {
        const double an = c.a(n);
        if (an == 0.0) throw InvariantViolation("a(" + std::to_string(n) + ") = 0 during propagation");
        at(n + 1) = ((z - c.b(n)) * at(n) - c.a(n - 1) * at(n - 1)) / an;
        rescale_if_needed(at(n + 1));
    }
    for (Index n = n0; n > L; --n) {
        const double am = c.a(n - 1);
        if (am == 0.0) throw InvariantViolation("a(" + std::to_string(n - 1) + ") = 0 during propagation");
        at(n - 1) = ((z - c.b(n)) * at(n) - c.a(n) * at(n + 1)) / am;
        rescale_if_needed(at(n - 1));
    }
    return {z, window, std::move(u), log_scale};
}

/// phi(z, left) = 0, phi(z, left+1) = 1: the solution obeying the left Dirichlet condition.
inline SolutionSample phi_fundamental(const CoefficientModel& c, const LatticeWindow& w, cplx z,
                                      bool renormalize = true) {
    return solve_recurrence(c, z, w.left(), 0.0, 1.0, w, renormalize);
}

/**
 * theta(z, left) = -1/a(left), theta(z, left+1) = 0, so that W(phi, theta) = 1
 * and M(z) = -W(theta,u+)/W(phi,u+) is a Herglotz function.
 */
inline SolutionSample theta_fundamental(const CoefficientModel& c, const LatticeWindow& w, cplx z,
                                        bool renormalize = true) {
    return solve_recurrence(c, z, w.left(), -1.0 / c.a(w.left()), 0.0, w, renormalize);
}

/// phi(., n) as polynomials in z for every site of the window; entry i is site left+i.
inline std::vector<RealPolynomial> phi_polynomials(const CoefficientModel& c, const LatticeWindow& w) {
    c.require_window(w);
    std::vector<RealPolynomial> p(w.size());
    p[0] = RealPolynomial{};
    p[1] = RealPolynomial::constant(1.0);
    for (Index n = w.first_interior(); n < w.right(); ++n) {
        const auto i = static_cast<std::size_t>(n - w.left());
        RealPolynomial next = p[i].times_x() - c.b(n) * p[i] - c.a(n - 1) * p[i - 1];
        p[i + 1] = (1.0 / c.a(n)) * next;
    }
    return p;
}

/// theta(., n) as polynomials; same normalization as theta_fundamental.
inline std::vector<RealPolynomial> theta_polynomials(const CoefficientModel& c, const LatticeWindow& w) {
    c.require_window(w);
    std::vector<RealPolynomial> p(w.size());
    p[0] = RealPolynomial::constant(-1.0 / c.a(w.left()));
    p[1] = RealPolynomial{};
    for (Index n = w.first_interior(); n < w.right(); ++n) {
        const auto i = static_cast<std::size_t>(n - w.left());
        RealPolynomial next = p[i].times_x() - c.b(n) * p[i] - c.a(n - 1) * p[i - 1];
        p[i + 1] = (1.0 / c.a(n)) * next;
    }
    return p;
}

/// a(n) (|f(n) g(n+1)| + |f(n+1) g(n)|): the size of the terms that cancel in W(f,g)(n).
template <LatticeSequence F, LatticeSequence G>
double wronskian_scale(const CoefficientModel& c, const F& f, const G& g, Index n) {
    return c.a(n) * (std::abs(cplx(f(n)) * cplx(g(n + 1))) + std::abs(cplx(f(n + 1)) * cplx(g(n))));
}

/**
 * Largest |W(f,g)(n) - W(f,g)(left)| over the window, relative to the larger of
 * |W(f,g)(left)| and the running maximum of wronskian_scale up to n.
 */
inline double wronskian_variation(const CoefficientModel& c, const SolutionSample& f, const SolutionSample& g) {
    const auto& w = f.window();
    const cplx w0 = wronskian(c, f, g, w.left());
    double scale = std::max(std::abs(w0), wronskian_scale(c, f, g, w.left()));
    double worst = 0.0;
    for (Index n = w.left() + 1; n < w.right(); ++n) {
        scale = std::max(scale, wronskian_scale(c, f, g, n));
        if (scale > 0.0) worst = std::max(worst, std::abs(wronskian(c, f, g, n) - w0) / scale);
    }
    return worst;
}

} // namespace jweyl

#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "jweyl/coefficients.hpp"
#include "jweyl/errors.hpp"
#include "jweyl/spectra.hpp"
#include "jweyl/weyl.hpp"

namespace jweyl {

/**
 * Spectral transformation of a window: f^(lambda_k) = sum_m phi(lambda_k, m) f(m)
 * over the interior sites, with inverse f(n) = sum_k phi(lambda_k, n) f^(lambda_k) w_k.
 */
class SpectralTransform {
public:
    SpectralTransform(const CoefficientModel& c, const LatticeWindow& w) : window_(w), rho_(spectral_measure(c, w)) {
        phi_.reserve(rho_.atoms.size());
        for (const auto& a : rho_.atoms) phi_.push_back(eigenfunction_phi(c, w, a.lambda));
    }

    const LatticeWindow& window() const noexcept { return window_; }
    const SpectralMeasure& measure() const noexcept { return rho_; }
    /// phi(lambda_k, first_interior + i)
    double phi(std::size_t k, std::size_t i) const { return phi_[k][i]; }
    std::size_t size() const noexcept { return rho_.atoms.size(); }

    template <typename T>
    std::vector<T> forward(const std::vector<T>& f) const {
        check(f.size());
        std::vector<T> out(size(), T{});
        for (std::size_t k = 0; k < size(); ++k)
            for (std::size_t i = 0; i < f.size(); ++i) out[k] += phi_[k][i] * f[i];
        return out;
    }

    template <typename T>
    std::vector<T> inverse(const std::vector<T>& fhat) const {
        check(fhat.size());
        std::vector<T> out(size(), T{});
        for (std::size_t k = 0; k < size(); ++k)
            for (std::size_t i = 0; i < size(); ++i) out[i] += phi_[k][i] * fhat[k] * rho_.atoms[k].weight;
        return out;
    }

    /// sum_k |f^(lambda_k)|^2 w_k
    template <typename T>
    double spectral_norm2(const std::vector<T>& fhat) const {
        check(fhat.size());
        double s = 0.0;
        for (std::size_t k = 0; k < size(); ++k) s += std::norm(fhat[k]) * rho_.atoms[k].weight;
        return s;
    }

private:
    void check(std::size_t n) const {
        if (n != size()) throw DomainError("transform: vector length must equal the number of interior sites");
    }

    LatticeWindow window_;
    SpectralMeasure rho_;
    std::vector<std::vector<double>> phi_;
};

template <typename T>
std::vector<T> forward_transform(const CoefficientModel& c, const LatticeWindow& w, const std::vector<T>& f) {
    return SpectralTransform(c, w).forward(f);
}

template <typename T>
std::vector<T> inverse_transform(const CoefficientModel& c, const LatticeWindow& w, const std::vector<T>& fhat) {
    return SpectralTransform(c, w).inverse(fhat);
}

/// (H f)(n) on the interior sites with Dirichlet conditions at both ends.
template <typename T>
std::vector<T> apply_window_operator(const CoefficientModel& c, const LatticeWindow& w, const std::vector<T>& f) {
    const std::size_t N = w.interior_size();
    if (f.size() != N) throw DomainError("apply_window_operator: length mismatch");
    std::vector<T> out(N);
    for (std::size_t i = 0; i < N; ++i) {
        const Index n = w.first_interior() + static_cast<Index>(i);
        T v = c.b(n) * f[i];
        if (i > 0) v += c.a(n - 1) * f[i - 1];
        if (i + 1 < N) v += c.a(n) * f[i + 1];
        out[i] = v;
    }
    return out;
}

inline double norm2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
}

inline double norm2(const std::vector<cplx>& v) {
    double s = 0.0;
    for (const auto& x : v) s += std::norm(x);
    return s;
}

/**
 * Largest deviation between the transform of m -> d^k/dz^k G(z, n, m) and
 * k! phi(lambda, n) / (lambda - z)^(k+1) over the atoms. For k = 0 the Green
 * function comes from phi and psi; for k >= 1 from the eigen-expansion.
 */
inline double green_transform_defect(const CoefficientModel& c, const LatticeWindow& w, cplx z, Index n, int order) {
    const SpectralTransform U(c, w);
    std::vector<cplx> g(U.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const Index m = w.first_interior() + static_cast<Index>(i);
        g[i] = order == 0 ? green_function(c, w, z, n, m) : green_function_derivative(c, w, z, n, m, order);
    }
    const auto ghat = U.forward(g);
    double factorial = 1.0;
    for (int k = 2; k <= order; ++k) factorial *= k;
    const auto ni = static_cast<std::size_t>(n - w.first_interior());
    double worst = 0.0;
    for (std::size_t k = 0; k < U.size(); ++k) {
        const double lambda = U.measure().atoms[k].lambda;
        const cplx expect = factorial * U.phi(k, ni) / std::pow(lambda - z, order + 1);
        worst = std::max(worst, std::abs(ghat[k] - expect) / std::max(1.0, std::abs(expect)));
    }
    return worst;
}

} // namespace jweyl

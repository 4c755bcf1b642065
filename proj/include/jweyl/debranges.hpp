#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "jweyl/coefficients.hpp"
#include "jweyl/errors.hpp"
#include "jweyl/lattice.hpp"
#include "jweyl/polynomial.hpp"
#include "jweyl/quadrature.hpp"
#include "jweyl/spectra.hpp"

namespace jweyl {

/**
 * De Branges space B(n) of a window: E(z, n) = phi(z, n) - i a(n) phi(z, n+1),
 * kernel K(zeta, z, n) = sum_{m <= n} conj(phi(zeta, m)) phi(z, m) and inner
 * product (1/pi) int conj(F) G / |E|^2 over the real line. Elements of B(n) are
 * the polynomials of degree < n - left.
 */
class DeBrangesSpace {
public:
    DeBrangesSpace(const CoefficientModel& c, const LatticeWindow& w, Index n)
        : model_(c), window_(w), n_(n), phi_(phi_polynomials(c, w)) {
        if (n <= w.left() || n + 1 > w.right()) throw DomainError("de Branges space: need left < n < right");
        const LatticeWindow inner(w.left(), n + 1);
        breaks_ = window_eigenvalues(c, inner);
        scale_ = 1.0;
        for (double x : breaks_) scale_ = std::max(scale_, 2.0 * std::abs(x));
    }

    Index site() const noexcept { return n_; }
    const LatticeWindow& window() const noexcept { return window_; }
    /// Dimension n - left; the largest admissible degree is dimension() - 1.
    int dimension() const noexcept { return static_cast<int>(n_ - window_.left()); }

    /// phi(., m) as a polynomial.
    const RealPolynomial& phi(Index m) const { return phi_.at(static_cast<std::size_t>(m - window_.left())); }

    cplx E(cplx z) const {
        const SolutionSample p = phi_fundamental(model_, window_, z, false);
        return p(n_) - cplx(0.0, model_.a(n_)) * p(n_ + 1);
    }
    cplx E_sharp(cplx z) const { return std::conj(E(std::conj(z))); }

    /// 1 / |E(lambda)|^2 on the real line, from the recurrence.
    double weight(double lambda) const {
        double prev = 0.0, cur = 1.0;
        for (Index m = window_.first_interior(); m <= n_; ++m) {
            const double next = ((lambda - model_.b(m)) * cur - model_.a(m - 1) * prev) / model_.a(m);
            prev = cur;
            cur = next;
        }
        // prev = phi(lambda, n), cur = phi(lambda, n+1)
        const double an = model_.a(n_);
        return 1.0 / (prev * prev + an * an * cur * cur);
    }

    cplx kernel(cplx zeta, cplx z) const {
        const SolutionSample pz = phi_fundamental(model_, window_, z, false);
        const SolutionSample pw = phi_fundamental(model_, window_, zeta, false);
        cplx s{0.0, 0.0};
        for (Index m = window_.first_interior(); m <= n_; ++m) s += std::conj(pw(m)) * pz(m);
        return s;
    }

    /// K(w, ., n) as a polynomial for real w.
    RealPolynomial kernel_section(double w) const {
        RealPolynomial k;
        for (Index m = window_.first_interior(); m <= n_; ++m) k = k + phi(m)(w) * phi(m);
        return k;
    }

    /**
     * (E(z) E#(conj zeta) - E(conj zeta) E#(z)) / (2i (conj zeta - z)), the closed
     * form of the reproducing kernel.
     */
    cplx kernel_from_E(cplx zeta, cplx z) const {
        const cplx zs = std::conj(zeta);
        return (E(z) * E_sharp(zs) - E(zs) * E_sharp(z)) / (cplx(0.0, 2.0) * (zs - z));
    }

    template <typename T, typename U>
    cplx inner_product(const Polynomial<T>& F, const Polynomial<U>& G, double abs_tol = 1e-13,
                       double rel_tol = 1e-12) const {
        if (std::max(F.degree(), G.degree()) > dimension() - 1)
            throw DomainError("not an element of B(n): degree " + std::to_string(std::max(F.degree(), G.degree())) +
                              " > " + std::to_string(dimension() - 1));
        auto f = [&](double x) { return cplx(std::conj(cplx(F(x))) * cplx(G(x))) * weight(x); };
        const auto r = integrate_real_line(f, scale_, breaks_, abs_tol, rel_tol);
        return r.value / std::numbers::pi;
    }

    template <typename T>
    double norm2(const Polynomial<T>& F) const {
        return inner_product(F, F).real();
    }

private:
    CoefficientModel model_;
    LatticeWindow window_;
    Index n_;
    std::vector<RealPolynomial> phi_;
    std::vector<double> breaks_;
    double scale_ = 1.0;
};

inline cplx de_branges_E(const CoefficientModel& c, const LatticeWindow& w, Index n, cplx z) {
    return DeBrangesSpace(c, w, n).E(z);
}

inline cplx reproducing_kernel(const CoefficientModel& c, const LatticeWindow& w, Index n, cplx zeta, cplx z) {
    return DeBrangesSpace(c, w, n).kernel(zeta, z);
}

struct EmbeddingReport {
    double b_norm2 = 0.0;
    double l2_norm2 = 0.0;
    double residual = 0.0;
};

/// ||F||^2 in B(n) against int |F|^2 d rho.
template <typename T>
EmbeddingReport embedding_check(const DeBrangesSpace& space, const Polynomial<T>& F, const SpectralMeasure& rho) {
    EmbeddingReport r;
    r.b_norm2 = space.norm2(F);
    for (const auto& a : rho.atoms) r.l2_norm2 += std::norm(F(a.lambda)) * a.weight;
    r.residual = std::abs(r.b_norm2 - r.l2_norm2);
    return r;
}

struct ChainReport {
    int dim_n = 0;
    int dim_next = 0;
    /// max |<phi_m, phi_m'>_{B(n)} - <phi_m, phi_m'>_{B(n+1)}| over m, m' <= n
    double gram_mismatch = 0.0;
    /// max |<phi_m, phi_m'>_{B(n)} - delta_mm'|
    double unitarity_defect = 0.0;
    /// max over sample points w and m <= n of |<K(w,.,n), phi_m>_{B(n+1)} - phi(w, m)|
    double kernel_mismatch = 0.0;
    /// Monic complement direction: phi(., n+1) / leading coefficient.
    RealPolynomial complement;
    /// max |<phi(., n+1), phi_m>_{B(n+1)}| over m <= n
    double complement_overlap = 0.0;
    bool holds = false;
};

/**
 * B(n) inside B(n+1): the basis phi(., m), m <= n, must have the same Gram
 * matrix in both spaces, kernel sections of B(n) must reproduce in B(n+1), and
 * phi(., n+1) spans the orthogonal complement.
 */
inline ChainReport chain_inclusion_check(const CoefficientModel& c, const LatticeWindow& w, Index n,
                                         double tol = 1e-8) {
    if (!w.is_interior(n) || !w.is_interior(n + 1)) throw DomainError("chain_inclusion_check: n and n+1 must be interior");
    const DeBrangesSpace bn(c, w, n), bn1(c, w, n + 1);
    ChainReport rep;
    rep.dim_n = bn.dimension();
    rep.dim_next = bn1.dimension();
    for (Index m = w.first_interior(); m <= n; ++m)
        for (Index k = w.first_interior(); k <= m; ++k) {
            const cplx g0 = bn.inner_product(bn.phi(m), bn.phi(k));
            const cplx g1 = bn1.inner_product(bn.phi(m), bn.phi(k));
            rep.gram_mismatch = std::max(rep.gram_mismatch, std::abs(g0 - g1));
            rep.unitarity_defect = std::max(rep.unitarity_defect, std::abs(g0 - (m == k ? 1.0 : 0.0)));
        }
    for (double x : {-1.3, -0.4, 0.25, 1.1}) {
        const RealPolynomial K = bn.kernel_section(x);
        for (Index m = w.first_interior(); m <= n; ++m)
            rep.kernel_mismatch =
                std::max(rep.kernel_mismatch, std::abs(bn1.inner_product(K, bn.phi(m)) - bn.phi(m)(x)));
    }
    const RealPolynomial& next = bn1.phi(n + 1);
    rep.complement = (1.0 / next.leading()) * next;
    for (Index m = w.first_interior(); m <= n; ++m)
        rep.complement_overlap = std::max(rep.complement_overlap, std::abs(bn1.inner_product(next, bn.phi(m))));
    rep.holds = rep.dim_next == rep.dim_n + 1 && rep.gram_mismatch <= tol && rep.kernel_mismatch <= tol &&
                rep.complement_overlap <= tol;
    return rep;
}

} // namespace jweyl

#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "jweyl/coefficients.hpp"
#include "jweyl/errors.hpp"
#include "jweyl/lattice.hpp"
#include "jweyl/tridiagonal.hpp"

namespace jweyl {

/// Interior matrix of a window: diagonal b(n), off-diagonal a(n) between n and n+1.
struct JacobiMatrix {
    std::vector<double> diag;
    std::vector<double> off;

    std::size_t size() const noexcept { return diag.size(); }

    /// max row sum of absolute values
    double norm_inf() const {
        double m = 0.0;
        for (std::size_t i = 0; i < diag.size(); ++i) {
            double r = std::abs(diag[i]);
            if (i > 0) r += std::abs(off[i - 1]);
            if (i + 1 < diag.size()) r += std::abs(off[i]);
            m = std::max(m, r);
        }
        return m;
    }
};

inline JacobiMatrix window_matrix(const CoefficientModel& c, const LatticeWindow& w) {
    c.require_window(w);
    JacobiMatrix m;
    m.diag.reserve(w.interior_size());
    for (Index n = w.first_interior(); n <= w.last_interior(); ++n) {
        m.diag.push_back(c.b(n));
        if (n < w.last_interior()) m.off.push_back(c.a(n));
    }
    return m;
}

struct SpectrumResult {
    std::vector<double> eigenvalues;
    /// Orthonormal eigenvectors over the interior sites; empty unless requested.
    std::vector<std::vector<double>> eigenvectors;
    /// ||H v - lambda v|| for a unit vector v belonging to each eigenvalue.
    std::vector<double> residuals;
};

inline constexpr double kEigenResidualTolerance = 1e-12;

/**
 * Eigenvalues of the interior Jacobi matrix of `w`, ascending.
 * Residuals use the QL eigenvectors when requested, otherwise inverse-iteration
 * vectors; a residual above tol * max(1, ||H||) is reported as a convergence failure.
 */
inline SpectrumResult eigen_tridiagonal(const CoefficientModel& c, const LatticeWindow& w, bool want_vectors = false,
                                        double tol = kEigenResidualTolerance) {
    const JacobiMatrix m = window_matrix(c, w);
    TridiagonalEigen eig = symmetric_tridiagonal_eigen(m.diag, m.off, want_vectors);
    SpectrumResult out;
    out.eigenvalues = std::move(eig.values);
    out.residuals.reserve(out.eigenvalues.size());
    const double scale = std::max(1.0, m.norm_inf());
    for (std::size_t k = 0; k < out.eigenvalues.size(); ++k) {
        const double lambda = out.eigenvalues[k];
        const std::vector<double> v = want_vectors ? eig.vectors[k] : inverse_iteration(m.diag, m.off, lambda);
        const double r = tridiagonal_residual(m.diag, m.off, lambda, v);
        if (!(r <= tol * scale))
            throw ConvergenceError("eigenvalue " + std::to_string(k) + " has residual " + std::to_string(r),
                                   static_cast<long>(k));
        out.residuals.push_back(r);
    }
    if (want_vectors) out.eigenvectors = std::move(eig.vectors);
    return out;
}

/// Eigenvalues only, without residual bookkeeping (large probe windows).
inline std::vector<double> window_eigenvalues(const CoefficientModel& c, const LatticeWindow& w) {
    const JacobiMatrix m = window_matrix(c, w);
    return symmetric_tridiagonal_eigen(m.diag, m.off, false).values;
}

/// Zeros of phi(., n), i.e. the spectrum of the window [left, n].
inline std::vector<double> phi_zeros(const CoefficientModel& c, const LatticeWindow& w, Index n) {
    if (n <= w.left() || n > w.right()) throw DomainError("phi_zeros: site outside (left, right]");
    if (n == w.left() + 1) return {};
    return window_eigenvalues(c, LatticeWindow(w.left(), n));
}

/// Strict alternation of two sorted lists (either may start), sizes differing by at most one.
inline bool strictly_interlaced(const std::vector<double>& x, const std::vector<double>& y, double tol = 1e-10) {
    const std::size_t nx = x.size(), ny = y.size();
    if ((nx > ny ? nx - ny : ny - nx) > 1) return false;
    std::vector<std::pair<double, int>> merged;
    merged.reserve(nx + ny);
    for (double v : x) merged.emplace_back(v, 0);
    for (double v : y) merged.emplace_back(v, 1);
    std::sort(merged.begin(), merged.end());
    for (std::size_t i = 1; i < merged.size(); ++i) {
        if (merged[i].second == merged[i - 1].second) return false;
        const double gap = merged[i].first - merged[i - 1].first;
        if (!(gap > tol * std::max(1.0, std::abs(merged[i].first)))) return false;
    }
    return true;
}

/// Zeros of phi(., n) (`inner`) and of phi(., n+1) (`outer`).
struct RestrictionSpectra {
    Index site = 0;
    std::vector<double> inner;
    std::vector<double> outer;
    bool inner_empty = false;
    bool interlaced = false;
};

inline RestrictionSpectra restriction_spectra(const CoefficientModel& c, const LatticeWindow& w, Index n) {
    if (n < w.first_interior() || n >= w.right())
        throw DomainError("restriction_spectra: site must satisfy left+1 <= n < right");
    RestrictionSpectra r;
    r.site = n;
    r.inner = phi_zeros(c, w, n);
    r.outer = phi_zeros(c, w, n + 1);
    r.inner_empty = r.inner.empty();
    r.interlaced = strictly_interlaced(r.inner, r.outer) && r.outer.size() == r.inner.size() + 1;
    return r;
}

/**
 * phi(lambda, m) on the interior sites for an eigenvalue lambda of the window.
 *
 * The left-normalized solution is propagated forward from the left end and the
 * right-Dirichlet solution backward from the right end; the two are joined at
 * the peak of the eigenvector, where both propagations are in their growing
 * direction.
 */
inline std::vector<double> eigenfunction_phi(const CoefficientModel& c, const LatticeWindow& w, double lambda) {
    const JacobiMatrix m = window_matrix(c, w);
    const std::size_t N = m.size();
    std::vector<double> fwd(N), bwd(N);
    const Index L = w.first_interior();
    auto idx = [L](Index n) { return static_cast<std::size_t>(n - L); };

    fwd[0] = 1.0;
    if (N > 1) fwd[1] = (lambda - c.b(L)) / c.a(L);
    for (Index n = L + 1; n < w.last_interior(); ++n)
        fwd[idx(n + 1)] = ((lambda - c.b(n)) * fwd[idx(n)] - c.a(n - 1) * fwd[idx(n - 1)]) / c.a(n);

    const Index R = w.last_interior();
    bwd[N - 1] = 1.0;
    if (N > 1) bwd[N - 2] = (lambda - c.b(R)) / c.a(R - 1);
    for (Index n = R - 1; n > L; --n)
        bwd[idx(n - 1)] = ((lambda - c.b(n)) * bwd[idx(n)] - c.a(n) * bwd[idx(n + 1)]) / c.a(n - 1);

    const std::vector<double> v = inverse_iteration(m.diag, m.off, lambda);
    std::size_t peak = 0;
    for (std::size_t i = 1; i < N; ++i)
        if (std::abs(v[i]) > std::abs(v[peak])) peak = i;

    std::vector<double> phi(N);
    const double join = fwd[peak] / bwd[peak];
    for (std::size_t i = 0; i < N; ++i) phi[i] = i <= peak ? fwd[i] : join * bwd[i];
    return phi;
}

/// gamma^2 = sum over interior sites of phi(lambda, m)^2 for each eigenvalue.
inline std::vector<double> norming_constants(const CoefficientModel& c, const LatticeWindow& w,
                                             const std::vector<double>& eigenvalues, double tol = 1e-8) {
    const JacobiMatrix m = window_matrix(c, w);
    const double scale = std::max(1.0, m.norm_inf());
    std::vector<double> out;
    out.reserve(eigenvalues.size());
    for (double lambda : eigenvalues) {
        const std::vector<double> phi = eigenfunction_phi(c, w, lambda);
        double g2 = 0.0;
        for (double x : phi) g2 += x * x;
        const double residual = tridiagonal_residual(m.diag, m.off, lambda, phi) / std::sqrt(g2);
        if (!(residual <= tol * scale))
            throw PreconditionError("norming_constants: " + std::to_string(lambda) +
                                    " is not an eigenvalue of the window (relative residual " +
                                    std::to_string(residual) + ")");
        out.push_back(g2);
    }
    return out;
}

struct Atom {
    double lambda = 0.0;
    double weight = 0.0;
    friend bool operator==(const Atom&, const Atom&) = default;
};

/// Finite atomic measure, atoms sorted by location, weights positive.
struct SpectralMeasure {
    std::vector<Atom> atoms;
    /// Which phi the weights refer to, e.g. "left-dirichlet".
    std::string normalization = "left-dirichlet";

    double total_mass() const {
        double s = 0.0;
        for (const auto& a : atoms) s += a.weight;
        return s;
    }
    std::vector<double> locations() const {
        std::vector<double> v;
        v.reserve(atoms.size());
        for (const auto& a : atoms) v.push_back(a.lambda);
        return v;
    }
    std::vector<double> weights() const {
        std::vector<double> v;
        v.reserve(atoms.size());
        for (const auto& a : atoms) v.push_back(a.weight);
        return v;
    }
    friend bool operator==(const SpectralMeasure&, const SpectralMeasure&) = default;
};

inline SpectralMeasure spectral_measure(const CoefficientModel& c, const LatticeWindow& w) {
    const SpectrumResult s = eigen_tridiagonal(c, w);
    const std::vector<double> g2 = norming_constants(c, w, s.eigenvalues);
    SpectralMeasure rho;
    rho.atoms.reserve(g2.size());
    for (std::size_t k = 0; k < g2.size(); ++k) rho.atoms.push_back({s.eigenvalues[k], 1.0 / g2[k]});
    return rho;
}

// ---------------------------------------------------------------------------
// Convergence exponent and genus of a discrete set

enum class SequenceKind {
    /// The list is the whole set.
    finite,
    /// The list is the beginning of an infinite set.
    truncated
};

/// Estimator output; never a certificate.
struct GrowthEstimate {
    double exponent = 0.0;
    double standard_error = 0.0;
    int genus = 0;
    /// Set when the fitted range spans less than two decades or the fit is poor.
    bool low_confidence = false;
    std::string note;
};

namespace detail {

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
};

inline LineFit least_squares_line(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    LineFit f;
    f.slope = sxx > 0.0 ? sxy / sxx : 0.0;
    f.intercept = my - f.slope * mx;
    if (x.size() > 2 && sxx > 0.0) {
        double ssr = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double r = y[i] - (f.intercept + f.slope * x[i]);
            ssr += r * r;
        }
        f.slope_stderr = std::sqrt(ssr / (n - 2.0) / sxx);
    }
    return f;
}

} // namespace detail

inline constexpr std::size_t kMinGrowthPoints = 10;
/// Terms must decay at least like j^-(1 + margin) to count as summable.
inline constexpr double kSummabilityMargin = 0.05;

namespace detail {

inline std::vector<double> sorted_moduli(std::vector<double> moduli) {
    for (auto& m : moduli) m = std::abs(m);
    std::sort(moduli.begin(), moduli.end());
    if (!moduli.empty() && !(moduli.front() > 0.0))
        throw PreconditionError("convergence exponent: moduli must be nonzero");
    return moduli;
}

/// Fit range: the upper 90% of the indices.
inline std::size_t fit_start(std::size_t n) { return n / 10; }

} // namespace detail

/**
 * Convergence exponent inf{s : sum 1/(1+|mu|^s) < inf} estimated by a
 * least-squares fit of log N(r) against log r (N the counting function) over the
 * upper 90% of the points. Finite sets have exponent 0.
 */
inline GrowthEstimate convergence_exponent(std::vector<double> moduli, SequenceKind kind) {
    GrowthEstimate est;
    if (kind == SequenceKind::finite) {
        est.note = "finite set";
        return est;
    }
    if (moduli.size() < kMinGrowthPoints)
        throw PreconditionError("convergence exponent: need at least " + std::to_string(kMinGrowthPoints) +
                                " points, got " + std::to_string(moduli.size()));
    const auto r = detail::sorted_moduli(std::move(moduli));
    std::vector<double> lx, ly;
    for (std::size_t j = detail::fit_start(r.size()); j < r.size(); ++j) {
        lx.push_back(std::log(r[j]));
        ly.push_back(std::log(static_cast<double>(j + 1)));
    }
    const auto fit = detail::least_squares_line(lx, ly);
    est.exponent = std::max(0.0, fit.slope);
    est.standard_error = fit.slope_stderr;
    const double decades = (lx.back() - lx.front()) / std::log(10.0);
    est.low_confidence = decades < 2.0 || fit.slope_stderr > 0.05;
    est.note = "log-log fit of the counting function over " + std::to_string(lx.size()) + " points, " +
               std::to_string(decades) + " decades";
    return est;
}

/**
 * Genus: smallest p >= 0 with sum 1/(1+|mu|^(p+1)) < inf. Summability of the
 * truncated tail is decided by the log-log decay rate of the terms in the index:
 * a rate steeper than -(1 + kSummabilityMargin) counts as convergent.
 */
inline int genus(std::vector<double> moduli, SequenceKind kind) {
    if (kind == SequenceKind::finite) return 0;
    if (moduli.size() < kMinGrowthPoints)
        throw PreconditionError("genus: need at least " + std::to_string(kMinGrowthPoints) + " points");
    const auto r = detail::sorted_moduli(std::move(moduli));
    std::vector<double> lj;
    for (std::size_t j = detail::fit_start(r.size()); j < r.size(); ++j) lj.push_back(std::log(static_cast<double>(j + 1)));
    for (int p = 0; p < 64; ++p) {
        std::vector<double> lt;
        for (std::size_t j = detail::fit_start(r.size()); j < r.size(); ++j)
            lt.push_back(-std::log1p(std::pow(r[j], static_cast<double>(p + 1))));
        if (detail::least_squares_line(lj, lt).slope < -(1.0 + kSummabilityMargin)) return p;
    }
    throw PreconditionError("genus: moduli grow too slowly for a finite genus");
}

inline GrowthEstimate growth_estimate(const std::vector<double>& moduli, SequenceKind kind) {
    GrowthEstimate e = convergence_exponent(moduli, kind);
    e.genus = genus(moduli, kind);
    return e;
}

// ---------------------------------------------------------------------------
// Heuristic discreteness probe for a half-line restriction

enum class HalfLine { left, right };
enum class DiscretenessVerdict { discrete_likely, continuous_likely, inconclusive };

inline const char* verdict_name(DiscretenessVerdict v) {
    switch (v) {
    case DiscretenessVerdict::discrete_likely: return "discrete-likely";
    case DiscretenessVerdict::continuous_likely: return "continuous-likely";
    case DiscretenessVerdict::inconclusive: return "inconclusive";
    }
    return "?";
}

struct DiscretenessReport {
    DiscretenessVerdict verdict = DiscretenessVerdict::inconclusive;
    /// Window sizes actually used.
    std::vector<Index> sizes;
    /// Number of eigenvalues in the reference interval, per window.
    std::vector<std::size_t> counts;
    /// Largest movement of the reference-interval eigenvalues between the last two windows.
    double last_shift = 0.0;
    double interval_lo = 0.0;
    double interval_hi = 0.0;
    std::string evidence;
};

/**
 * Compares spectra of growing truncations of the half line (sites -N..-1 for
 * the left side, 1..N for the right side). The reference interval is
 * [lambda_min, lambda_min + 2] of the smallest window. Stable eigenvalues there
 * suggest discrete spectrum; counts growing with N suggest continuous spectrum.
 */
inline DiscretenessReport discreteness_probe(const CoefficientModel& c, HalfLine side, std::vector<Index> sizes) {
    DiscretenessReport rep;
    std::sort(sizes.begin(), sizes.end());
    auto window_for = [side](Index n) { return side == HalfLine::left ? LatticeWindow(-n, 0) : LatticeWindow(0, n); };

    const auto bound = side == HalfLine::left ? c.lowest() : c.highest();
    if (bound) {
        rep.verdict = DiscretenessVerdict::discrete_likely;
        rep.evidence = "coefficients end at site " + std::to_string(*bound) + ": finite half line";
        return rep;
    }
    if (sizes.size() < 2 || sizes.front() < 3) {
        rep.evidence = "need at least two window sizes >= 3";
        return rep;
    }

    std::vector<std::vector<double>> spectra;
    for (Index n : sizes) {
        spectra.push_back(window_eigenvalues(c, window_for(n)));
        rep.sizes.push_back(n);
    }
    rep.interval_lo = spectra.front().front();
    rep.interval_hi = rep.interval_lo + 2.0;
    std::vector<std::vector<double>> inside;
    for (const auto& s : spectra) {
        std::vector<double> in;
        for (double x : s)
            if (x >= rep.interval_lo - 1e-9 && x <= rep.interval_hi) in.push_back(x);
        rep.counts.push_back(in.size());
        inside.push_back(std::move(in));
    }

    const auto& a = inside[inside.size() - 2];
    const auto& b = inside.back();
    const bool same_count = a.size() == b.size();
    if (same_count)
        for (std::size_t i = 0; i < a.size(); ++i)
            rep.last_shift = std::max(rep.last_shift, std::abs(a[i] - b[i]) / (1.0 + std::abs(b[i])));
    else
        rep.last_shift = INFINITY;

    const double size_ratio = static_cast<double>(sizes.back()) / static_cast<double>(sizes.front());
    const double count_ratio = static_cast<double>(rep.counts.back()) / std::max<double>(1.0, rep.counts.front());

    if (same_count && rep.last_shift < 1e-6 && rep.counts.back() > 0) {
        rep.verdict = DiscretenessVerdict::discrete_likely;
        rep.evidence = "eigenvalues in the reference interval are stable (shift " + std::to_string(rep.last_shift) + ")";
    } else if (rep.counts.back() >= 3 && count_ratio >= 0.5 * size_ratio) {
        rep.verdict = DiscretenessVerdict::continuous_likely;
        rep.evidence = "eigenvalue count in the reference interval grows with the window (" +
                       std::to_string(rep.counts.front()) + " -> " + std::to_string(rep.counts.back()) + ")";
    } else {
        rep.evidence = "neither stabilization nor proportional growth observed";
    }
    return rep;
}

} // namespace jweyl

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "jweyl/coefficients.hpp"
#include "jweyl/errors.hpp"
#include "jweyl/lattice.hpp"
#include "jweyl/spectra.hpp"
#include "jweyl/weyl.hpp"

namespace jweyl {

/// E_p(zeta, z) = (1 - z/zeta) exp(sum_{k=1}^p z^k / (k zeta^k)),  E_p(0, z) = z.
inline cplx elementary_factor(int p, cplx zeta, cplx z) {
    if (p < 0) throw PreconditionError("elementary_factor: p must be >= 0");
    if (zeta == 0.0) return z;
    const cplx q = z / zeta;
    cplx s{0.0, 0.0}, qk{1.0, 0.0};
    for (int k = 1; k <= p; ++k) {
        qk *= q;
        s += qk / static_cast<double>(k);
    }
    return (1.0 - q) * std::exp(s);
}

/**
 * Two strictly interlacing real sets nu_0 < mu_1 < nu_1 < mu_2 < ...
 * nu holds the zeros of phi(., n) (poles of m-(., n)), mu those of
 * phi(., n-1). `site` is the anchor n.
 */
struct InterlacedSpectra {
    std::vector<double> mu;
    std::vector<double> nu;
    Index site = 1;
    SequenceKind kind = SequenceKind::finite;
    /// Ordering slack for computed spectra: pairs closer than this are unresolved ties, not violations.
    double tol = 0.0;

    void validate() const {
        if (!(nu.size() == mu.size() || nu.size() == mu.size() + 1))
            throw PreconditionError("interlacing: need |nu| = |mu| or |mu| + 1");
        for (std::size_t j = 0; j < mu.size(); ++j) {
            if (!(nu[j] < mu[j] + tol))
                throw PreconditionError("interlacing violated: nu[" + std::to_string(j) + "] >= mu[" +
                                        std::to_string(j) + "]");
            if (j + 1 < nu.size() && !(mu[j] < nu[j + 1] + tol))
                throw PreconditionError("interlacing violated: mu[" + std::to_string(j) + "] >= nu[" +
                                        std::to_string(j + 1) + "]");
        }
    }
};

/// Snaps |x| <= tol to exactly 0 so that E_p(0, z) = z applies.
inline std::vector<double> snap_zeros(std::vector<double> v, double tol) {
    for (auto& x : v)
        if (std::abs(x) <= tol) x = 0.0;
    return v;
}

/// Spectral data of m-(., n) for a window: mu = zeros of phi(., n-1), nu = zeros of phi(., n).
inline InterlacedSpectra krein_spectra(const CoefficientModel& c, const LatticeWindow& w, Index n) {
    if (n <= w.first_interior() || n > w.right()) throw DomainError("krein_spectra: need left+1 < n <= right");
    const double scale = std::max(1.0, window_matrix(c, w).norm_inf());
    const double tol = 1e-13 * scale;
    InterlacedSpectra s;
    s.site = n;
    s.tol = 1e-10 * scale;
    s.mu = snap_zeros(phi_zeros(c, w, n - 1), tol);
    s.nu = snap_zeros(phi_zeros(c, w, n), tol);
    s.kind = SequenceKind::finite;
    s.validate();
    return s;
}

/// m-(z, n) = C prod_j E_0(mu_j, z) / prod_j E_0(nu_j, z), evaluated pairwise.
struct ProductRepresentation {
    int genus = 0;
    double C = 1.0;
    InterlacedSpectra spectra;
    std::size_t truncation = 0;
    /// Relative change of the product at z = i when the truncation is halved (0 for finite data).
    double tail_estimate = 0.0;
    /// Largest relative mismatch against the samples used in the fit.
    double fit_discrepancy = 0.0;

    cplx product(cplx z, std::size_t terms) const {
        const auto& mu = spectra.mu;
        const auto& nu = spectra.nu;
        cplx p{1.0, 0.0};
        const std::size_t J = std::min(terms, nu.size());
        for (std::size_t j = 0; j < J; ++j) {
            const cplx num = j < mu.size() ? elementary_factor(0, mu[j], z) : cplx(1.0);
            p *= num / elementary_factor(0, nu[j], z);
        }
        return p;
    }
    cplx product(cplx z) const { return product(z, spectra.nu.size()); }
    cplx operator()(cplx z) const { return C * product(z); }
};

/**
 * Fits C from the first sample (m, z) and validates the product against the
 * remaining ones; a relative mismatch above `tol` is a FitFailure.
 */
inline ProductRepresentation krein_fit(const InterlacedSpectra& spectra, const std::vector<std::pair<cplx, cplx>>& samples,
                                       double tol = 1e-10) {
    spectra.validate();
    if (samples.empty()) throw PreconditionError("krein_fit: need at least one sample");
    ProductRepresentation rep;
    rep.spectra = spectra;
    rep.truncation = spectra.nu.size();
    const auto [z0, m0] = samples.front();
    const cplx p0 = rep.product(z0);
    if (p0 == 0.0 || !std::isfinite(std::abs(p0))) throw PreconditionError("krein_fit: first sample at a zero or pole");
    const cplx Cc = m0 / p0;
    if (std::abs(Cc.imag()) > tol * std::abs(Cc))
        throw FitFailure("krein_fit: fitted constant is not real", std::abs(Cc.imag()) / std::abs(Cc));
    rep.C = Cc.real();
    if (rep.C == 0.0) throw FitFailure("krein_fit: fitted constant vanishes", 1.0);
    for (const auto& [z, m] : samples)
        rep.fit_discrepancy = std::max(rep.fit_discrepancy, std::abs(rep(z) - m) / std::abs(m));
    if (spectra.kind == SequenceKind::truncated && rep.truncation >= 2) {
        const cplx full = rep.product(cplx(0.0, 1.0));
        const cplx half = rep.product(cplx(0.0, 1.0), rep.truncation / 2);
        rep.tail_estimate = std::abs(full - half) / std::abs(full);
    }
    if (rep.fit_discrepancy > tol)
        throw FitFailure("krein_fit: samples disagree with the fitted product", rep.fit_discrepancy);
    return rep;
}

/// Samples of m-(., n) at the given points, for krein_fit.
inline std::vector<std::pair<cplx, cplx>> m_minus_samples(const CoefficientModel& c, const LatticeWindow& w, Index n,
                                                          const std::vector<cplx>& zs) {
    std::vector<std::pair<cplx, cplx>> out;
    for (const cplx z : zs) out.emplace_back(z, m_half_line(c, w, z, Side::left, n));
    return out;
}

// ---------------------------------------------------------------------------
// phi from two spectra

struct PhiConstruction {
    int genus = 0;
    /// alpha(z) = prod E_p(nu, z): the value at the anchor site n.
    std::function<cplx(cplx)> alpha;
    /// beta(z) = -a C e^{h(z)} prod E_p(mu, z): the value at n - 1.
    std::function<cplx(cplx)> beta;
    /// h(z) = sum_{k=1}^p h_k z^k
    std::vector<double> h;
    /// Conservative truncation-error estimate of each h_k (0 for finite data).
    std::vector<double> h_tail;
};

/**
 * Initial data (beta, alpha) at sites (n-1, n) of a solution that is
 * proportional to phi, built only from the two spectra, the constant C of the
 * product and a(n-1).
 */
inline PhiConstruction construct_phi_from_spectra(const ProductRepresentation& rep, int p, double a) {
    if (p < 0) throw PreconditionError("construct_phi_from_spectra: genus must be >= 0");
    const auto& s = rep.spectra;
    s.validate();
    PhiConstruction out;
    out.genus = p;
    for (int k = 1; k <= p; ++k) {
        // Pairwise sum of nu_{j}^-k - mu_{j}^-k; E_p(0, .) carries no exponential part.
        std::vector<double> terms;
        for (std::size_t j = 0; j < std::max(s.nu.size(), s.mu.size()); ++j) {
            double t = 0.0;
            if (j < s.nu.size() && s.nu[j] != 0.0) t += std::pow(s.nu[j], -k);
            if (j < s.mu.size() && s.mu[j] != 0.0) t -= std::pow(s.mu[j], -k);
            terms.push_back(t);
        }
        double sum = 0.0, late = 0.0;
        for (std::size_t j = 0; j < terms.size(); ++j) {
            sum += terms[j];
            if (j >= terms.size() / 2) late += terms[j];
        }
        double tail = 0.0;
        if (s.kind == SequenceKind::truncated && terms.size() >= kMinGrowthPoints) {
            std::vector<double> lx, ly;
            for (std::size_t j = terms.size() / 2; j < terms.size(); ++j)
                if (terms[j] != 0.0) {
                    lx.push_back(std::log(static_cast<double>(j + 1)));
                    ly.push_back(std::log(std::abs(terms[j])));
                }
            const double slope = lx.size() >= 2 ? detail::least_squares_line(lx, ly).slope : -2.0;
            if (slope >= -(1.0 + kSummabilityMargin))
                throw ConvergenceError("construct_phi_from_spectra: divergent sum for h coefficient k = " +
                                           std::to_string(k),
                                       k);
            // late-half sum plus the integral of the power-law envelope beyond the last term
            const double J = static_cast<double>(terms.size());
            tail = std::abs(late) + std::abs(terms.back()) * J / (-slope - 1.0);
        }
        out.h.push_back(sum / k);
        out.h_tail.push_back(tail / k);
    }
    const std::vector<double> mu = s.mu, nu = s.nu, h = out.h;
    const double C = rep.C;
    out.alpha = [nu, p](cplx z) {
        cplx v{1.0, 0.0};
        for (double x : nu) v *= elementary_factor(p, x, z);
        return v;
    };
    out.beta = [mu, h, p, a, C](cplx z) {
        cplx v{1.0, 0.0};
        for (double x : mu) v *= elementary_factor(p, x, z);
        cplx hz{0.0, 0.0}, zk{1.0, 0.0};
        for (std::size_t k = 0; k < h.size(); ++k) {
            zk *= z;
            hz += h[k] * zk;
        }
        return -a * C * std::exp(hz) * v;
    };
    return out;
}

struct Proportionality {
    /// u = constant * phi with one constant for all sample points, if detected
    std::optional<cplx> constant;
    /// u(z, .) / phi(z, .) at each sample point (e^{poly(z)} for genus p >= 1)
    std::vector<cplx> factors;
    /// Largest relative spread of u(z, m) / phi(z, m) over the sites, per sample point.
    double spread = 0.0;
    /// Relative spread of the factors across sample points.
    double z_spread = 0.0;
    bool proportional = false;
};

/**
 * Propagates (beta, alpha) from sites (n-1, n) across the window and compares
 * with phi at every sample z and interior site.
 */
inline Proportionality detect_proportionality(const PhiConstruction& pc, const CoefficientModel& c,
                                              const LatticeWindow& w, Index n, const std::vector<cplx>& zs,
                                              double tol = 1e-10) {
    Proportionality out;
    for (const cplx z : zs) {
        const SolutionSample u = solve_recurrence(c, z, n - 1, pc.beta(z), pc.alpha(z), w, false);
        const SolutionSample phi = phi_fundamental(c, w, z, false);
        std::optional<cplx> ref;
        for (Index m = w.first_interior(); m <= w.last_interior(); ++m) {
            if (std::abs(phi(m)) < 1e-8) continue;
            const cplx r = u(m) / phi(m);
            if (!ref) ref = r;
            out.spread = std::max(out.spread, std::abs(r - *ref) / std::abs(*ref));
        }
        if (std::abs(u(w.left())) > tol * std::max(1.0, std::abs(u(w.left() + 1))))
            out.spread = std::max(out.spread, std::abs(u(w.left())));
        out.factors.push_back(ref.value_or(cplx(0.0)));
    }
    out.proportional = !out.factors.empty() && out.spread <= tol;
    for (const cplx f : out.factors)
        out.z_spread = std::max(out.z_spread, std::abs(f - out.factors.front()) / std::abs(out.factors.front()));
    if (out.proportional && out.z_spread <= tol) out.constant = out.factors.front();
    return out;
}

// ---------------------------------------------------------------------------
// Disc criterion

struct DiscViolation {
    double x = 0.0;
    double y = 0.0;
    double gap = 0.0;
    double radii = 0.0;
};

struct DiscReport {
    bool holds = false;
    /// Points with |x| <= 1, outside the criterion.
    std::vector<double> excluded;
    std::vector<DiscViolation> violations;
    std::optional<DiscViolation> first_violation;
    /// Violations among the upper half of the points.
    std::size_t tail_violations = 0;
    bool coincident = false;
};

/**
 * Discs |z - x| < |x|^-r around all points of mu and nu with |x| > 1.
 * Neighbouring discs on the line are compared; "all but finitely many" is read
 * as: no overlap among the upper half of the points, and no coincident points.
 */
inline DiscReport disc_disjoint_check(const InterlacedSpectra& s, double r) {
    if (!(r > 0.0)) throw PreconditionError("disc_disjoint_check: r must be positive");
    DiscReport rep;
    std::vector<double> pts;
    for (const auto* v : {&s.mu, &s.nu})
        for (double x : *v) (std::abs(x) > 1.0 ? pts : rep.excluded).push_back(x);
    std::sort(pts.begin(), pts.end());
    std::sort(rep.excluded.begin(), rep.excluded.end());
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double gap = pts[i + 1] - pts[i];
        const double radii = std::pow(std::abs(pts[i]), -r) + std::pow(std::abs(pts[i + 1]), -r);
        if (gap == 0.0) rep.coincident = true;
        if (gap < radii) {
            DiscViolation v{pts[i], pts[i + 1], gap, radii};
            if (!rep.first_violation) rep.first_violation = v;
            rep.violations.push_back(v);
            if (i >= pts.size() / 2) ++rep.tail_violations;
        }
    }
    rep.holds = !rep.coincident && rep.tail_violations == 0;
    return rep;
}

// ---------------------------------------------------------------------------
// Growth order of an entire function

struct OrderEstimate {
    double order = 0.0;
    double standard_error = 0.0;
    std::vector<double> radii;
    std::vector<double> log_max;
};

/// Slope of log log M(r) against log r, M(r) = max |f| over `samples` points of |z| = r.
template <typename Fn>
OrderEstimate growth_order(const Fn& f, const std::vector<double>& radii, int samples = 64) {
    if (radii.size() < 3) throw PreconditionError("growth_order: need at least three radii");
    OrderEstimate est;
    std::vector<double> lx, ly;
    for (double r : radii) {
        double m = 0.0;
        for (int k = 0; k < samples; ++k) {
            const double t = 2.0 * std::numbers::pi * k / samples;
            m = std::max(m, std::abs(f(std::polar(r, t))));
        }
        est.radii.push_back(r);
        est.log_max.push_back(std::log(m));
        if (std::log(m) > 0.0) {
            lx.push_back(std::log(r));
            ly.push_back(std::log(std::log(m)));
        }
    }
    if (lx.size() < 3) throw PreconditionError("growth_order: function does not grow on the given radii");
    const auto fit = detail::least_squares_line(lx, ly);
    est.order = fit.slope;
    est.standard_error = fit.slope_stderr;
    return est;
}

} // namespace jweyl

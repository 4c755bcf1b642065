#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "jweyl/coefficients.hpp"
#include "jweyl/errors.hpp"
#include "jweyl/lattice.hpp"
#include "jweyl/polynomial.hpp"
#include "jweyl/spectra.hpp"
#include "jweyl/weyl.hpp"

namespace jweyl {

// ---------------------------------------------------------------------------
// Reconstruction from a finite spectral measure

struct ReconstructionResult {
    /// a(1) .. a(N-1)
    std::vector<double> a;
    /// b(1) .. b(N)
    std::vector<double> b;
    /// Three-term residual ||Lambda q_j - a_j q_{j+1} - b_j q_j - a_{j-1} q_{j-1}|| per step.
    std::vector<double> residuals;
    /// max |Q^T Q - I| of the generated orthonormal family.
    double orthogonality_defect = 0.0;
    /// Input mass before renormalization; 1 when no renormalization was needed.
    double input_mass = 1.0;
    bool renormalized = false;

    /**
     * Table model on the window [first-1, first+N]. The measure does not fix
     * a at the two boundary sites; they are set to 1 (and b to 0 there).
     */
    CoefficientModel model(Index first = 1) const {
        std::vector<double> av{1.0}, bv{0.0};
        av.insert(av.end(), a.begin(), a.end());
        av.push_back(1.0);
        av.push_back(1.0);
        bv.insert(bv.end(), b.begin(), b.end());
        bv.push_back(0.0);
        return CoefficientModel::table(first - 1, std::move(av), std::move(bv));
    }
    LatticeWindow window(Index first = 1) const { return {first - 1, first + static_cast<Index>(b.size())}; }
};

/**
 * Stieltjes / Lanczos procedure on diag(lambda) started from sqrt(w), with full
 * reorthogonalization. Step j produces b(j+1) and a(j+1) of the Jacobi matrix
 * whose left-Dirichlet spectral measure is rho.
 */
inline ReconstructionResult reconstruct_from_measure(const SpectralMeasure& rho, std::size_t N) {
    const std::size_t K = rho.atoms.size();
    if (N == 0) throw PreconditionError("reconstruct_from_measure: N must be positive");
    if (K < N)
        throw PreconditionError("reconstruct_from_measure: measure has " + std::to_string(K) + " atoms, need " +
                                std::to_string(N));
    ReconstructionResult out;
    out.input_mass = rho.total_mass();
    if (!(out.input_mass > 0.0)) throw PreconditionError("reconstruct_from_measure: measure has no mass");
    out.renormalized = std::abs(out.input_mass - 1.0) > 1e-12;

    std::vector<double> lambda(K);
    std::vector<std::vector<double>> Q;
    std::vector<double> q(K);
    double scale = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
        lambda[k] = rho.atoms[k].lambda;
        q[k] = std::sqrt(rho.atoms[k].weight / out.input_mass);
        scale = std::max(scale, std::abs(lambda[k]));
    }
    scale = std::max(scale, 1.0);

    auto dot = [K](const std::vector<double>& x, const std::vector<double>& y) {
        double s = 0.0;
        for (std::size_t k = 0; k < K; ++k) s += x[k] * y[k];
        return s;
    };

    Q.push_back(q);
    for (std::size_t j = 0; j < N; ++j) {
        const auto& qj = Q[j];
        std::vector<double> r(K);
        for (std::size_t k = 0; k < K; ++k) r[k] = lambda[k] * qj[k];
        const double bj = dot(qj, r);
        out.b.push_back(bj);
        for (std::size_t k = 0; k < K; ++k) {
            r[k] -= bj * qj[k];
            if (j > 0) r[k] -= out.a[j - 1] * Q[j - 1][k];
        }
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& v : Q) {
                const double c = dot(v, r);
                for (std::size_t k = 0; k < K; ++k) r[k] -= c * v[k];
            }
        const double aj = std::sqrt(dot(r, r));
        // residual of the relation with the raw (pre-reorthogonalization) coefficients
        double res = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
            double v = lambda[k] * qj[k] - bj * qj[k] - r[k];
            if (j > 0) v -= out.a[j - 1] * Q[j - 1][k];
            res += v * v;
        }
        out.residuals.push_back(std::sqrt(res));
        if (j + 1 == N) break;
        if (!(aj > 1e3 * std::numeric_limits<double>::epsilon() * scale))
            throw ConvergenceError("reconstruct_from_measure: Krylov space exhausted at step " + std::to_string(j) +
                                       " (a = " + std::to_string(aj) + "); measure nearly degenerate",
                                   static_cast<long>(j));
        out.a.push_back(aj);
        for (auto& x : r) x /= aj;
        Q.push_back(std::move(r));
    }
    for (std::size_t i = 0; i < Q.size(); ++i)
        for (std::size_t j = 0; j <= i; ++j)
            out.orthogonality_defect = std::max(out.orthogonality_defect, std::abs(dot(Q[i], Q[j]) - (i == j ? 1.0 : 0.0)));
    if (out.orthogonality_defect > 1e-8)
        throw ConvergenceError("reconstruct_from_measure: loss of orthogonality, defect " +
                                   std::to_string(out.orthogonality_defect),
                               static_cast<long>(N));
    return out;
}

// ---------------------------------------------------------------------------
// Borg-Marchenko rate

/**
 * M1(z) - M0(z) for two operators on the same window, computed from the
 * coefficient differences without forming either M. With r(n) = u+(n+1)/u+(n),
 * r(n-1) = a(n-1) / ((z - b(n)) - a(n) r(n)); the recursion is run for both
 * operators and for the difference r1 - r0 simultaneously, so that agreement
 * of the coefficients near the left end is not lost to cancellation.
 */
inline cplx weyl_difference(const CoefficientModel& h0, const CoefficientModel& h1, const LatticeWindow& w, cplx z) {
    h0.require_window(w);
    h1.require_window(w);
    cplx r0{0.0, 0.0}, r1{0.0, 0.0}, dr{0.0, 0.0};
    for (Index n = w.last_interior(); n > w.left(); --n) {
        const double a0n = h0.a(n), a1n = h1.a(n);
        const cplx den0 = (z - h0.b(n)) - (n == w.last_interior() ? cplx(0.0) : a0n * r0);
        const cplx den1 = (z - h1.b(n)) - (n == w.last_interior() ? cplx(0.0) : a1n * r1);
        const double db = h1.b(n) - h0.b(n);
        const double da = h1.a(n) - h0.a(n);
        const cplx dden = n == w.last_interior() ? cplx(db) : cplx(db) + da * r1 + a0n * dr;  // den0 - den1
        const double a0 = h0.a(n - 1), a1 = h1.a(n - 1);
        const double dam = a1 - a0;
        if (den0 == 0.0 || den1 == 0.0) throw PoleError("weyl_difference: z hits a restricted eigenvalue", z, z.real());
        dr = (dam * den0 + a0 * dden) / (den0 * den1);
        r0 = a0 / den0;
        r1 = a1 / den1;
    }
    const double a0 = h0.a(w.left()), a1 = h1.a(w.left());
    return -(a0 * dr - (a1 - a0) * r0) / (a0 * a1);
}

struct RateReport {
    std::vector<double> ray_angles;
    std::vector<double> t;
    /// values[i][j] = |M1 - M0 - f|(t_j e^{i angle_i})
    std::vector<std::vector<double>> values;
    std::vector<double> slopes;
    /// -(2 deg phi0(., n~+1) + 1)
    double predicted = 0.0;
    double slope_tolerance = 0.3;
    bool identical = false;
    bool consistent = false;
    std::string verdict;
};

inline std::vector<double> log_spaced(double lo, double hi, std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i)
        v[i] = std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * static_cast<double>(i) / static_cast<double>(n - 1));
    return v;
}

inline const std::vector<double>& default_rays() {
    static const std::vector<double> rays{std::numbers::pi / 4, std::numbers::pi / 2, 3 * std::numbers::pi / 4};
    return rays;
}

/**
 * Fits the log-log decay of |M1 - M0 - f| along each ray and compares it with
 * the rate predicted by agreement of the coefficients up to n~: the verdict is
 * "consistent" when every slope is at most predicted + slope_tolerance.
 */
inline RateReport borg_marchenko_rate(const CoefficientModel& h0, const CoefficientModel& h1, const LatticeWindow& w,
                                      Index ntilde, const std::vector<double>& rays = default_rays(),
                                      const Polynomial<cplx>& f = {}, double t_lo = 10.0, double t_hi = 1e4,
                                      std::size_t samples = 16, double slope_tolerance = 0.3) {
    if (!w.is_interior(ntilde + 1) && ntilde + 1 != w.right())
        throw DomainError("borg_marchenko_rate: n~ + 1 must lie in the window");
    if (ntilde < w.left()) throw DomainError("borg_marchenko_rate: n~ must lie in the window");
    if (samples < 8) throw PreconditionError("borg_marchenko_rate: need at least 8 samples per ray");
    for (double th : rays)
        if (std::abs(std::sin(th)) < 1e-12) throw PreconditionError("borg_marchenko_rate: rays must be non-real");

    RateReport rep;
    rep.ray_angles = rays;
    rep.t = log_spaced(t_lo, t_hi, samples);
    rep.slope_tolerance = slope_tolerance;
    rep.predicted = -(2.0 * static_cast<double>(ntilde - w.left()) + 1.0);
    rep.identical = true;
    double worst = -INFINITY;
    for (double th : rays) {
        std::vector<double> vals, lx, ly;
        for (double t : rep.t) {
            const cplx z = std::polar(t, th);
            const double v = std::abs(weyl_difference(h0, h1, w, z) - f(z));
            vals.push_back(v);
            if (v > 0.0) {
                lx.push_back(std::log(t));
                ly.push_back(std::log(v));
            }
        }
        double slope = -INFINITY;
        if (lx.size() >= 2) {
            rep.identical = false;
            slope = detail::least_squares_line(lx, ly).slope;
        }
        rep.values.push_back(std::move(vals));
        rep.slopes.push_back(slope);
        worst = std::max(worst, slope);
    }
    rep.consistent = worst <= rep.predicted + slope_tolerance;
    rep.verdict = rep.identical ? "consistent (difference identically zero)"
                                : (rep.consistent ? "consistent" : "violated");
    return rep;
}

// ---------------------------------------------------------------------------
// Hochstadt-Liebermann probe

struct HLReport {
    Index ntilde = 0;
    std::vector<double> t;
    /// |chi0(it, n~) / phi0(it, n~)|
    std::vector<double> ratio;
    double ratio_slope = 0.0;
    bool ratio_vanishes = false;
    std::size_t trials = 0;
    std::uint64_t seed = 0;
    double magnitude_lo = 0.05;
    double magnitude_hi = 0.2;
    /// Per trial: largest eigenvalue displacement.
    std::vector<double> displacements;
    double min_displacement = 0.0;
    /// Sites whose a(n) / b(n) were perturbed.
    Index a_first = 0, a_last = -1, b_first = 0, b_last = -1;
};

/**
 * (1) the ratio chi0(it, n~) / phi0(it, n~) along the imaginary axis, chi0 the
 * right-Dirichlet solution; (2) random perturbations of a(n), n >= n~-1 and
 * b(n), n >= n~ (left data fixed), each with max |delta| drawn from
 * [magnitude_lo, magnitude_hi], and the largest eigenvalue displacement they cause.
 */
inline HLReport hochstadt_liebermann_probe(const CoefficientModel& c, const LatticeWindow& w, Index ntilde,
                                           std::size_t trials, std::uint64_t seed, double magnitude_lo = 0.05,
                                           double magnitude_hi = 0.2) {
    if (!w.is_interior(ntilde)) throw DomainError("hochstadt_liebermann_probe: n~ must be interior");
    if (!(0.0 <= magnitude_lo && magnitude_lo <= magnitude_hi))
        throw PreconditionError("hochstadt_liebermann_probe: need 0 <= magnitude_lo <= magnitude_hi");
    HLReport rep;
    rep.ntilde = ntilde;
    rep.trials = trials;
    rep.seed = seed;
    rep.magnitude_lo = magnitude_lo;
    rep.magnitude_hi = magnitude_hi;

    rep.t = log_spaced(10.0, 1e4, 16);
    std::vector<double> lx, ly;
    for (double t : rep.t) {
        const cplx z{0.0, t};
        const SolutionSample chi = u_plus(c, w, z).sample;
        const SolutionSample phi = phi_fundamental(c, w, z);
        const double r = std::abs(chi(ntilde) / phi(ntilde)) * std::exp(chi.log_scale() - phi.log_scale());
        rep.ratio.push_back(r);
        lx.push_back(std::log(t));
        ly.push_back(std::log(r));
    }
    rep.ratio_slope = detail::least_squares_line(lx, ly).slope;
    rep.ratio_vanishes = rep.ratio_slope < -0.5;

    rep.a_first = std::max(ntilde - 1, w.first_interior());
    rep.a_last = w.last_interior() - 1;
    rep.b_first = ntilde;
    rep.b_last = w.last_interior();

    const CoefficientModel base = c.tabulate(w);
    const std::vector<double> ev0 = window_eigenvalues(base, w);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_real_distribution<double> mag(magnitude_lo, magnitude_hi);
    rep.min_displacement = trials == 0 ? 0.0 : INFINITY;
    for (std::size_t trial = 0; trial < trials; ++trial) {
        std::vector<double> da, db;
        double peak = 0.0;
        for (Index n = rep.a_first; n <= rep.a_last; ++n) peak = std::max(peak, std::abs(da.emplace_back(unit(rng))));
        for (Index n = rep.b_first; n <= rep.b_last; ++n) peak = std::max(peak, std::abs(db.emplace_back(unit(rng))));
        const double m = mag(rng);
        CoefficientModel pert = base;
        if (peak > 0.0) {
            for (Index n = rep.a_first; n <= rep.a_last; ++n) {
                const double v = base.a(n) + m * da[static_cast<std::size_t>(n - rep.a_first)] / peak;
                if (!(v > 0.0)) throw PreconditionError("hochstadt_liebermann_probe: perturbation makes a(n) <= 0");
                pert = pert.with_a(n, v);
            }
            for (Index n = rep.b_first; n <= rep.b_last; ++n)
                pert = pert.with_b(n, base.b(n) + m * db[static_cast<std::size_t>(n - rep.b_first)] / peak);
        }
        const std::vector<double> ev1 = window_eigenvalues(pert, w);
        double d = 0.0;
        for (std::size_t k = 0; k < ev0.size(); ++k) d = std::max(d, std::abs(ev1[k] - ev0[k]));
        rep.displacements.push_back(d);
        rep.min_displacement = std::min(rep.min_displacement, d);
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Shift equivalence

struct ShiftReport {
    std::optional<Index> k;
    Index compare_lo = 0;
    Index compare_hi = 0;
    /// Largest atom/weight difference between the measures of H1 on the compare window and H0 on its shift.
    double measure_discrepancy = 0.0;
    bool measures_agree = false;
};

/**
 * Smallest |k| (ties: positive first) in [-max_offset, max_offset] with
 * a1(n) = a0(n+k), b1(n) = b0(n+k) on the comparison range: the table range of
 * H1 when bounded, otherwise [-default_half, default_half].
 */
inline ShiftReport shift_equivalence(const CoefficientModel& h0, const CoefficientModel& h1, Index max_offset = 20,
                                     double tol = 1e-12, Index default_half = 20) {
    ShiftReport rep;
    rep.compare_lo = h1.lowest().value_or(-default_half);
    rep.compare_hi = h1.highest().value_or(default_half);
    auto close = [tol](double x, double y) { return std::abs(x - y) <= tol * std::max(1.0, std::abs(x)); };
    auto matches = [&](Index k) {
        for (Index n = rep.compare_lo; n <= rep.compare_hi; ++n) {
            if (!h0.defines(n + k)) return false;
            if (!close(h1.a(n), h0.a(n + k)) || !close(h1.b(n), h0.b(n + k))) return false;
        }
        return true;
    };
    for (Index d = 0; d <= max_offset && !rep.k; ++d)
        for (Index k : {d, -d})
            if (!rep.k && matches(k)) rep.k = k;
    if (rep.k && rep.compare_hi - rep.compare_lo >= 2) {
        const LatticeWindow w1(rep.compare_lo, rep.compare_hi);
        const auto r1 = spectral_measure(h1, w1);
        const auto r0 = spectral_measure(h0, w1.shifted(*rep.k));
        for (std::size_t i = 0; i < r1.atoms.size(); ++i)
            rep.measure_discrepancy = std::max({rep.measure_discrepancy, std::abs(r1.atoms[i].lambda - r0.atoms[i].lambda),
                                                std::abs(r1.atoms[i].weight - r0.atoms[i].weight)});
        rep.measures_agree = rep.measure_discrepancy <= 1e-10;
    } else if (rep.k) {
        rep.measures_agree = true;
    }
    return rep;
}

} // namespace jweyl

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "jweyl/coefficients.hpp"
#include "jweyl/errors.hpp"
#include "jweyl/lattice.hpp"
#include "jweyl/polynomial.hpp"
#include "jweyl/quadrature.hpp"
#include "jweyl/spectra.hpp"

namespace jweyl {

/**
 * Evaluable singular Weyl function.
 *
 * Either the discrete pole/residue form M(z) = sum_k w_k / (lambda_k - z)
 * (residue -w_k at lambda_k, w_k > 0), or an opaque sampler. Samplers may
 * carry the real points where they are known to be singular.
 */
class WeylFunction {
public:
    struct PoleResidue {
        std::vector<double> poles;
        std::vector<double> weights;
    };
    using Sampler = std::function<cplx(cplx)>;

    static WeylFunction pole_residue(std::vector<double> poles, std::vector<double> weights) {
        if (poles.size() != weights.size()) throw PreconditionError("pole_residue: size mismatch");
        for (double w : weights)
            if (!(w > 0.0)) throw InvariantViolation("pole_residue: weights must be positive");
        for (std::size_t k = 1; k < poles.size(); ++k)
            if (!(poles[k] > poles[k - 1])) throw InvariantViolation("pole_residue: poles must be strictly increasing");
        return WeylFunction(PoleResidue{std::move(poles), std::move(weights)});
    }

    static WeylFunction pole_residue(const SpectralMeasure& rho) {
        return pole_residue(rho.locations(), rho.weights());
    }

    static WeylFunction sampler(Sampler f, std::vector<double> known_singularities = {}) {
        WeylFunction m{Rep(std::move(f))};
        m.singular_ = std::move(known_singularities);
        return m;
    }

    cplx operator()(cplx z) const {
        if (const auto* pr = std::get_if<PoleResidue>(&rep_)) {
            cplx s{0.0, 0.0};
            for (std::size_t k = 0; k < pr->poles.size(); ++k) s += pr->weights[k] / (pr->poles[k] - z);
            return s;
        }
        return std::get<Sampler>(rep_)(z);
    }

    bool is_pole_residue() const noexcept { return std::holds_alternative<PoleResidue>(rep_); }

    const PoleResidue& pole_residue_data() const {
        if (const auto* pr = std::get_if<PoleResidue>(&rep_)) return *pr;
        throw PreconditionError("Weyl function is not in pole/residue form");
    }

    /// Real points where M is known to be singular (the poles in pole/residue form).
    std::vector<double> singular_points() const {
        if (const auto* pr = std::get_if<PoleResidue>(&rep_)) return pr->poles;
        return singular_;
    }

private:
    using Rep = std::variant<PoleResidue, Sampler>;
    explicit WeylFunction(Rep r) : rep_(std::move(r)) {}

    Rep rep_;
    std::vector<double> singular_;
};

/// Right-Dirichlet solution u+(z, right) = 0, u+(z, right-1) = 1.
struct WeylSolution {
    SolutionSample sample;
    /// z is (numerically) an eigenvalue of the window, so u+ is proportional to phi.
    bool at_eigenvalue = false;
};

inline constexpr double kPoleTolerance = 1e-13;

inline WeylSolution u_plus(const CoefficientModel& c, const LatticeWindow& w, cplx z) {
    SolutionSample u = solve_recurrence(c, z, w.right() - 1, 1.0, 0.0, w);
    // solve_recurrence fixes u(n0), u(n0+1); here n0 = right-1 carries 1 and right carries 0.
    double peak = 0.0;
    for (const auto& v : u.values()) peak = std::max(peak, std::abs(v));
    const bool hit = std::abs(u(w.left())) <= kPoleTolerance * peak;
    return {std::move(u), hit};
}

enum class Side { left, right };

/**
 * Half-line m-functions at site n.
 * left:  m-(z,n) = -phi(z,n-1) / (a(n-1) phi(z,n))
 * right: m+(z,n) = -u+(z,n+1) / (a(n) u+(z,n))
 */
inline cplx m_half_line(const CoefficientModel& c, const LatticeWindow& w, cplx z, Side side, Index n) {
    if (side == Side::left) {
        if (n <= w.left() || n > w.right()) throw DomainError("m-: site must satisfy left < n <= right");
        const SolutionSample phi = phi_fundamental(c, w, z);
        const cplx num = phi(n - 1);
        const cplx den = c.a(n - 1) * phi(n);
        if (std::abs(den) <= kPoleTolerance * std::max(std::abs(num), std::abs(den)) || den == 0.0) {
            const auto zeros = phi_zeros(c, w, n);
            double nearest = zeros.empty() ? NAN : zeros.front();
            for (double x : zeros)
                if (std::abs(x - z.real()) < std::abs(nearest - z.real())) nearest = x;
            throw PoleError("m- has a pole at z", z, nearest);
        }
        return -num / den;
    }
    if (n < w.left() || n >= w.right()) throw DomainError("m+: site must satisfy left <= n < right");
    const SolutionSample u = u_plus(c, w, z).sample;
    const cplx num = u(n + 1);
    const cplx den = c.a(n) * u(n);
    if (std::abs(den) <= kPoleTolerance * std::max(std::abs(num), std::abs(den)) || den == 0.0) {
        const auto zeros = n + 1 < w.right() ? window_eigenvalues(c, LatticeWindow(n, w.right())) : std::vector<double>{};
        double nearest = zeros.empty() ? NAN : zeros.front();
        for (double x : zeros)
            if (std::abs(x - z.real()) < std::abs(nearest - z.real())) nearest = x;
        throw PoleError("m+ has a pole at z", z, nearest);
    }
    return -num / den;
}

/**
 * Sampler form of the singular Weyl function,
 * M(z) = -W(theta(z), u+(z)) / W(phi(z), u+(z)),
 * with both Wronskians taken at the left end where theta and phi have their
 * initial values.
 */
inline cplx singular_M(const CoefficientModel& c, const LatticeWindow& w, cplx z) {
    const auto up = u_plus(c, w, z);
    const Index L = w.left();
    const double aL = c.a(L);
    const cplx uL = up.sample(L), uL1 = up.sample(L + 1);
    // theta(L) = -1/a(L), theta(L+1) = 0; phi(L) = 0, phi(L+1) = 1
    const cplx w_theta = aL * ((-1.0 / aL) * uL1 - 0.0 * uL);
    const cplx w_phi = aL * (0.0 * uL1 - 1.0 * uL);
    if (up.at_eigenvalue) {
        const auto ev = window_eigenvalues(c, w);
        double nearest = ev.front();
        for (double x : ev)
            if (std::abs(x - z.real()) < std::abs(nearest - z.real())) nearest = x;
        throw PoleError("singular Weyl function has a pole at z (W(phi, u+) = 0)", z, nearest);
    }
    return -w_theta / w_phi;
}

/// Sampler-backed WeylFunction for a window; the window spectrum is recorded as its singular set.
inline WeylFunction weyl_sampler(const CoefficientModel& c, const LatticeWindow& w) {
    auto model = std::make_shared<const CoefficientModel>(c);
    return WeylFunction::sampler([model, w](cplx z) { return singular_M(*model, w, z); }, window_eigenvalues(c, w));
}

/// Discrete form: poles at the window eigenvalues with weights gamma_k^-2.
inline WeylFunction pole_residue_form(const CoefficientModel& c, const LatticeWindow& w) {
    return WeylFunction::pole_residue(spectral_measure(c, w));
}

/**
 * Weyl solution psi = theta + M phi. Computed as u+ / alpha with
 * alpha = W(phi, u+) = -a(left) u+(left), so W(phi, psi) = W(phi, theta) = 1; avoids the cancellation in theta + M phi.
 */
inline SolutionSample weyl_psi(const CoefficientModel& c, const LatticeWindow& w, cplx z) {
    const auto up = u_plus(c, w, z);
    if (up.at_eigenvalue) throw PoleError("psi undefined at an eigenvalue", z, z.real());
    const cplx alpha = -c.a(w.left()) * up.sample(w.left());
    std::vector<cplx> v(up.sample.values().begin(), up.sample.values().end());
    for (auto& x : v) x /= alpha;
    return {z, w, std::move(v), 0.0};
}

/// G(z,n,m) = phi(z, min(n,m)) psi(z, max(n,m)).
inline cplx green_function(const CoefficientModel& c, const LatticeWindow& w, cplx z, Index n, Index m) {
    if (!w.is_interior(n) || !w.is_interior(m)) throw DomainError("green_function: sites must be interior");
    const SolutionSample phi = phi_fundamental(c, w, z, false);
    const SolutionSample psi = weyl_psi(c, w, z);
    return phi(std::min(n, m)) * psi(std::max(n, m));
}

/// d^k/dz^k G(z,n,m) from the eigen-expansion sum_j w_j phi(l_j,n) phi(l_j,m) k! / (l_j - z)^(k+1).
inline cplx green_function_derivative(const CoefficientModel& c, const LatticeWindow& w, cplx z, Index n, Index m,
                                      int order) {
    if (!w.is_interior(n) || !w.is_interior(m)) throw DomainError("green_function_derivative: sites must be interior");
    const SpectralMeasure rho = spectral_measure(c, w);
    double factorial = 1.0;
    for (int k = 2; k <= order; ++k) factorial *= k;
    cplx s{0.0, 0.0};
    for (const auto& at : rho.atoms) {
        const auto phi = eigenfunction_phi(c, w, at.lambda);
        const double pn = phi[static_cast<std::size_t>(n - w.first_interior())];
        const double pm = phi[static_cast<std::size_t>(m - w.first_interior())];
        s += at.weight * pn * pm * factorial / std::pow(at.lambda - z, order + 1);
    }
    return s;
}

// ---------------------------------------------------------------------------
// Stieltjes-Livsic inversion

struct InversionResult {
    /// 1/2 (rho((x0,x1)) + rho([x0,x1])), extrapolated to eps -> 0.
    double value = 0.0;
    std::vector<double> eps;
    /// (1/pi) int_{x0}^{x1} Im M(x + i eps) dx for each eps.
    std::vector<double> raw;
    double extrapolation_change = 0.0;
    bool converged = false;
};

inline const std::vector<double>& default_eps_sequence() {
    static const std::vector<double> seq{1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
    return seq;
}

namespace detail {

/// Polynomial extrapolation to 0 through the points (x_i, y_i) (Neville).
inline double extrapolate_to_zero(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> p(y);
    const std::size_t n = x.size();
    for (std::size_t level = 1; level < n; ++level)
        for (std::size_t i = 0; i + level < n; ++i)
            p[i] = (x[i + level] * p[i] - x[i] * p[i + 1]) / (x[i + level] - x[i]);
    return p[0];
}

/// int_{x0}^{x1} M(x + i eps) dx along the rectangle x0+i eps -> x0+iH -> x1+iH -> x1+i eps.
inline cplx contour_integral(const WeylFunction& M, double x0, double x1, double eps, double H) {
    const cplx I{0.0, 1.0};
    auto vertical = [&](double x) {
        // y = exp(s), dz = i y ds
        auto f = [&, x](double s) {
            const double y = std::exp(s);
            return M(cplx(x, y)) * I * y;
        };
        return integrate(f, std::log(eps), std::log(H), 1e-14, 1e-13).value;
    };
    auto top = [&](double x) { return M(cplx(x, H)); };
    const cplx up = vertical(x0);
    const cplx across = integrate(top, x0, x1, 1e-14, 1e-13).value;
    const cplx down = -vertical(x1);
    return up + across + down;
}

} // namespace detail

/**
 * Numerical Stieltjes-Livsic inversion. For each eps the integral of Im M along
 * the horizontal segment at height eps is evaluated on the equivalent contour
 * through the upper half plane (M is analytic there), which keeps the integrand
 * smooth no matter how small eps is. The eps-sequence is then extrapolated to 0.
 */
inline InversionResult stieltjes_inversion(const WeylFunction& M, double x0, double x1,
                                           const std::vector<double>& eps_sequence = default_eps_sequence(),
                                           double tol = 1e-7) {
    if (!(x0 < x1)) throw PreconditionError("stieltjes_inversion: need x0 < x1");
    if (eps_sequence.size() < 3) throw PreconditionError("stieltjes_inversion: need at least three eps values");
    const double H = std::max(1.0, x1 - x0);
    InversionResult r;
    r.eps = eps_sequence;
    for (double eps : eps_sequence)
        r.raw.push_back(detail::contour_integral(M, x0, x1, eps, H).imag() / std::numbers::pi);

    const std::size_t n = r.raw.size();
    const std::vector<double> xa(r.eps.end() - 3, r.eps.end()), ya(r.raw.end() - 3, r.raw.end());
    const std::vector<double> xb(r.eps.end() - 4 + (n < 4), r.eps.end() - 1), yb(r.raw.end() - 4 + (n < 4), r.raw.end() - 1);
    const double last = detail::extrapolate_to_zero(xa, ya);
    const double prev = detail::extrapolate_to_zero(xb, yb);
    r.value = last;
    r.extrapolation_change = std::abs(last - prev);
    r.converged = r.extrapolation_change <= tol;
    if (!r.converged) {
        std::string partial;
        for (double v : r.raw) partial += " " + std::to_string(v);
        throw ConvergenceError("stieltjes_inversion did not settle across the eps sequence; raw values:" + partial,
                               static_cast<long>(n - 1));
    }
    return r;
}

// ---------------------------------------------------------------------------
// Gauge freedom: theta~ = e^{-g} theta - f phi, phi~ = e^{g} phi

struct GaugeTransform {
    RealPolynomial g;
    RealPolynomial f;

    bool is_identity() const { return g.is_zero() && f.is_zero(); }
    bool is_constant_scaling() const { return g.degree() <= 0 && f.is_zero(); }
};

struct GaugedSystem {
    SolutionSample theta;
    SolutionSample phi;
    WeylFunction M;
    SpectralMeasure rho;
};

/// M~(z) = e^{-2g(z)} M(z) + e^{-g(z)} f(z); d rho~ = e^{-2g} d rho.
inline WeylFunction gauge_weyl(const GaugeTransform& tr, const WeylFunction& M) {
    if (tr.is_constant_scaling() && M.is_pole_residue()) {
        const double s = std::exp(-2.0 * tr.g(0.0));
        auto pr = M.pole_residue_data();
        for (auto& w : pr.weights) w *= s;
        return WeylFunction::pole_residue(std::move(pr.poles), std::move(pr.weights));
    }
    return WeylFunction::sampler(
        [tr, M](cplx z) {
            const cplx eg = std::exp(-tr.g(z));
            return eg * eg * M(z) + eg * tr.f(z);
        },
        M.singular_points());
}

inline SpectralMeasure gauge_measure(const GaugeTransform& tr, const SpectralMeasure& rho) {
    SpectralMeasure out = rho;
    for (auto& a : out.atoms) a.weight *= std::exp(-2.0 * tr.g(a.lambda));
    if (!tr.is_identity()) out.normalization = rho.normalization + "+gauge";
    return out;
}

inline GaugedSystem gauge_apply(const GaugeTransform& tr, const SolutionSample& theta, const SolutionSample& phi,
                                const WeylFunction& M, const SpectralMeasure& rho) {
    if (theta.z() != phi.z() || !(theta.window() == phi.window()))
        throw PreconditionError("gauge_apply: theta and phi must share z and window");
    if (theta.log_scale() != 0.0 || phi.log_scale() != 0.0)
        throw PreconditionError("gauge_apply: samples must be unscaled");
    const cplx z = theta.z();
    const cplx eg = std::exp(tr.g(z));
    const cplx fz = tr.f(z);
    std::vector<cplx> th, ph;
    for (std::size_t i = 0; i < theta.values().size(); ++i) {
        th.push_back(theta.values()[i] / eg - fz * phi.values()[i]);
        ph.push_back(eg * phi.values()[i]);
    }
    return {SolutionSample(z, theta.window(), std::move(th)), SolutionSample(z, phi.window(), std::move(ph)),
            gauge_weyl(tr, M), gauge_measure(tr, rho)};
}

/// Herglotz function int 1/(lambda - z) e^{-2g(lambda)} d rho(lambda).
inline WeylFunction herglotz_normalize(const SpectralMeasure& rho, const RealPolynomial& g) {
    std::vector<double> poles, weights;
    for (const auto& a : rho.atoms) {
        poles.push_back(a.lambda);
        weights.push_back(a.weight * std::exp(-2.0 * g(a.lambda)));
    }
    return WeylFunction::pole_residue(std::move(poles), std::move(weights));
}

// ---------------------------------------------------------------------------
// Integral representation M = E + g^(z) int (1/(l-z) - l/(1+l^2)) d rho / g^(l)

/// Positive-on-R entire weight g^ used in the integral representation.
struct EntireWeight {
    enum class Kind { one, exp_power };
    Kind kind = Kind::one;
    int power = 0;

    static EntireWeight one() { return {}; }
    /// exp(z^(2 ceil((p+1)/2))) for genus p.
    static EntireWeight for_genus(int p) { return {Kind::exp_power, 2 * ((p + 2) / 2)}; }

    cplx operator()(cplx z) const { return kind == Kind::one ? cplx(1.0) : std::exp(std::pow(z, power)); }
};

struct IntRepPoint {
    cplx z;
    cplx E;
    bool skipped = false;
};

struct IntRepReport {
    std::vector<IntRepPoint> points;
    /// max |Im E(x)| over real grid points
    double reality_defect = 0.0;
    /// max |E(conj z) - conj E(z)|
    double symmetry_defect = 0.0;
    /// max |E(z) - E(z_first)|; zero when E is constant
    double variation = 0.0;
    std::vector<std::string> notes;
};

inline cplx integral_representation_E(const WeylFunction& M, const SpectralMeasure& rho, const EntireWeight& gh, cplx z) {
    cplx s{0.0, 0.0};
    for (const auto& a : rho.atoms) {
        const double l = a.lambda;
        s += (1.0 / (l - z) - l / (1.0 + l * l)) * a.weight / gh(cplx(l)).real();
    }
    return M(z) - gh(z) * s;
}

inline IntRepReport integral_representation_residual(const WeylFunction& M, const SpectralMeasure& rho,
                                                     const EntireWeight& gh, const std::vector<cplx>& grid,
                                                     double atom_clearance = 1e-9) {
    IntRepReport rep;
    std::optional<cplx> first;
    for (const cplx z : grid) {
        bool near_atom = false;
        for (const auto& a : rho.atoms)
            if (std::abs(z - a.lambda) <= atom_clearance) near_atom = true;
        if (near_atom) {
            rep.points.push_back({z, {}, true});
            rep.notes.push_back("skipped grid point at an atom: " + std::to_string(z.real()));
            continue;
        }
        const cplx E = integral_representation_E(M, rho, gh, z);
        rep.points.push_back({z, E, false});
        if (z.imag() == 0.0) rep.reality_defect = std::max(rep.reality_defect, std::abs(E.imag()));
        const cplx Ec = integral_representation_E(M, rho, gh, std::conj(z));
        rep.symmetry_defect = std::max(rep.symmetry_defect, std::abs(Ec - std::conj(E)));
        if (!first) first = E;
        rep.variation = std::max(rep.variation, std::abs(E - *first));
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Support classification from boundary values of M

enum class SupportTag { absolutely_continuous, singular, point, none, inconclusive };

inline const char* support_name(SupportTag t) {
    switch (t) {
    case SupportTag::absolutely_continuous: return "Sigma_ac";
    case SupportTag::singular: return "Sigma_s";
    case SupportTag::point: return "Sigma_p";
    case SupportTag::none: return "none";
    case SupportTag::inconclusive: return "inconclusive";
    }
    return "?";
}

struct SupportPoint {
    double lambda = 0.0;
    SupportTag tag = SupportTag::inconclusive;
    double im_last = 0.0;
    double eps_im_last = 0.0;
};

inline const std::vector<double>& default_support_eps() {
    static const std::vector<double> seq{1e-3, 1e-4, 1e-5, 1e-6, 1e-7};
    return seq;
}

/**
 * Tags each lambda from the trend of Im M(lambda + i eps) and eps Im M(lambda + i eps)
 * over the eps sequence (last two values): a settled positive eps*Im M is a
 * point mass, a settled positive Im M is ac, Im M growing without a point-mass
 * limit is singular, a vanishing Im M is outside the support. This is evidence
 * on a grid, not a certificate of minimal supports.
 */
template <typename Fn>
std::vector<SupportPoint> classify_support(const Fn& M, const std::vector<double>& grid,
                                           const std::vector<double>& eps = default_support_eps(),
                                           double settle = 0.05, double floor = 1e-6) {
    if (eps.size() < 2) throw PreconditionError("classify_support: need at least two eps values");
    std::vector<SupportPoint> out;
    for (double lambda : grid) {
        const double e1 = eps[eps.size() - 2], e2 = eps.back();
        const double i1 = std::imag(M(cplx(lambda, e1)));
        const double i2 = std::imag(M(cplx(lambda, e2)));
        const double p1 = e1 * i1, p2 = e2 * i2;
        SupportPoint sp{lambda, SupportTag::inconclusive, i2, p2};
        if (p2 > floor && std::abs(p2 - p1) <= settle * p2)
            sp.tag = SupportTag::point;
        else if (i2 > floor && std::abs(i2 - i1) <= settle * i2)
            sp.tag = SupportTag::absolutely_continuous;
        else if (i2 > 3.0 * i1 && i2 > 1.0 && p2 < p1)
            sp.tag = SupportTag::singular;
        else if (std::abs(i2) <= floor && std::abs(p2) <= floor)
            sp.tag = SupportTag::none;
        out.push_back(sp);
    }
    return out;
}

/// Weyl m-function of the free half-line, the root of m^2 + z m + 1 = 0 with Im m > 0 for Im z > 0.
inline cplx free_half_line_m(cplx z) {
    const cplx r = std::sqrt(z * z - 4.0);
    cplx m = (-z + r) / 2.0;
    if (z.imag() > 0.0 ? m.imag() < 0.0 : std::abs(m) > 1.0) m = (-z - r) / 2.0;
    return m;
}

} // namespace jweyl

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "jweyl/weyl.hpp"
#include "oracles.hpp"

using namespace jweyl;

namespace {

const CoefficientModel kFree = CoefficientModel::free();
const LatticeWindow kP3(0, 4);
const double kSqrt2 = std::sqrt(2.0);

cplx p3_closed_form(cplx z) { return 0.5 / (0.0 - z) + 0.25 / (kSqrt2 - z) + 0.25 / (-kSqrt2 - z); }

/// (1/pi) int_{x0}^{x1} Im [w / (l - x - i eps)] dx in closed form.
double arctan_mass(double l, double w, double x0, double x1, double eps) {
    return w / std::numbers::pi * (std::atan((x1 - l) / eps) - std::atan((x0 - l) / eps));
}

} // namespace

TEST(UPlus, FreeBackwardIteration) {
    const cplx z(0.3, 0.9);
    const auto u = u_plus(kFree, kP3, z);
    EXPECT_FALSE(u.at_eigenvalue);
    EXPECT_EQ(u.sample(4), cplx(0.0));
    EXPECT_EQ(u.sample(3), cplx(1.0));
    EXPECT_NEAR(std::abs(u.sample(2) - z), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(u.sample(1) - (z * z - 1.0)), 0.0, 1e-15);
}

TEST(UPlus, EigenvalueIsFlagged) {
    const auto u = u_plus(kFree, kP3, 0.0);
    EXPECT_TRUE(u.at_eigenvalue);
    const auto phi = phi_fundamental(kFree, kP3, 0.0);
    EXPECT_NEAR(std::abs(wronskian(kFree, phi, u.sample, 1)), 0.0, 1e-15);
    EXPECT_THROW(singular_M(kFree, kP3, 0.0), PoleError);
}

TEST(UPlus, ConjugationSymmetry) {
    std::mt19937_64 rng(201);
    const auto rw = oracle::random_window(rng, 15, 15);
    const cplx z(0.4, 0.7);
    const auto a = u_plus(rw.model, rw.window, z).sample;
    const auto b = u_plus(rw.model, rw.window, std::conj(z)).sample;
    for (Index n = rw.window.left(); n <= rw.window.right(); ++n) EXPECT_EQ(b(n), std::conj(a(n)));
}

TEST(MHalfLine, FreeLeftExample) {
    for (cplx z : {cplx(0.2, 1.0), cplx(-3.0, 0.5)}) {
        EXPECT_NEAR(std::abs(m_half_line(kFree, kP3, z, Side::left, 3) + z / (z * z - 1.0)), 0.0, 1e-15);
        EXPECT_EQ(m_half_line(kFree, kP3, z, Side::left, 1), cplx(0.0));
    }
    for (double t : {1e2, 1e3, 1e4}) {
        const cplx z(0.0, t);
        EXPECT_LE(std::abs(m_half_line(kFree, kP3, z, Side::left, 3) + 1.0 / z), 2.0 / (t * t * t));
    }
    try {
        m_half_line(kFree, kP3, 1.0, Side::left, 3);
        FAIL() << "expected a pole";
    } catch (const PoleError& e) {
        EXPECT_NEAR(e.nearest_zero(), 1.0, 1e-15);
    }
}

// m-(z,n) is the last diagonal resolvent entry of [left, n]; m+(z,n) the first of [n, right].
TEST(MHalfLine, AgreesWithDenseResolvent) {
    std::mt19937_64 rng(202);
    for (int trial = 0; trial < 20; ++trial) {
        const auto rw = oracle::random_window(rng, 3, 20);
        const auto& w = rw.window;
        const cplx z = oracle::random_z(rng);
        for (Index n = w.first_interior() + 1; n < w.right(); ++n) {
            const LatticeWindow lw(w.left(), n);
            const auto col = oracle::resolvent_column(rw.model, lw, z, lw.interior_size() - 1);
            const cplx ref = col.back();
            EXPECT_NEAR(std::abs(m_half_line(rw.model, w, z, Side::left, n) - ref), 0.0, 1e-10 * std::abs(ref));
        }
        for (Index n = w.left(); n + 1 < w.right(); ++n) {
            const LatticeWindow rwin(n, w.right());
            const cplx ref = oracle::resolvent_column(rw.model, rwin, z, 0)[0];
            EXPECT_NEAR(std::abs(m_half_line(rw.model, w, z, Side::right, n) - ref), 0.0, 1e-10 * std::abs(ref));
        }
    }
}

TEST(SingularM, FreeThreeSiteClosedForm) {
    for (cplx z : {cplx(1.0, 1.0), cplx(-0.5, 0.1), cplx(2.0, -3.0)}) {
        EXPECT_NEAR(std::abs(singular_M(kFree, kP3, z) - p3_closed_form(z)), 0.0, 1e-15);
        EXPECT_NEAR(std::abs(pole_residue_form(kFree, kP3)(z) - p3_closed_form(z)), 0.0, 1e-15);
    }
    for (double eps : {1e-3, 1e-5, 1e-7}) {
        const double v = eps * singular_M(kFree, kP3, cplx(0.0, eps)).imag();
        EXPECT_NEAR(v, 0.5, 2.0 * eps);
    }
    const cplx z(0.7, 0.4);
    EXPECT_EQ(singular_M(kFree, kP3, std::conj(z)), std::conj(singular_M(kFree, kP3, z)));
}

TEST(SingularM, SamplerMatchesPoleResidueAndResolvent) {
    std::mt19937_64 rng(203);
    for (int trial = 0; trial < 40; ++trial) {
        const auto rw = oracle::random_window(rng, 1, 30);
        const auto pr = pole_residue_form(rw.model, rw.window);
        const auto sm = weyl_sampler(rw.model, rw.window);
        const cplx z = oracle::random_z(rng);
        const cplx ref = oracle::resolvent_column(rw.model, rw.window, z, 0)[0];
        EXPECT_NEAR(std::abs(sm(z) - ref), 0.0, 1e-9 * std::abs(ref));
        EXPECT_NEAR(std::abs(pr(z) - sm(z)), 0.0, 1e-9 * std::abs(ref));
        EXPECT_GT(pr(z).imag(), 0.0);
        EXPECT_EQ(sm.singular_points().size(), rw.window.interior_size());
    }
}

TEST(WeylFunction, PoleResidueValidation) {
    EXPECT_THROW(WeylFunction::pole_residue({0.0, 1.0}, {1.0}), PreconditionError);
    EXPECT_THROW(WeylFunction::pole_residue({0.0, 1.0}, {1.0, 0.0}), InvariantViolation);
    EXPECT_THROW(WeylFunction::pole_residue({1.0, 0.0}, {1.0, 1.0}), InvariantViolation);
    const auto m = WeylFunction::pole_residue({-1.0, 2.0}, {0.5, 0.5});
    EXPECT_TRUE(m.is_pole_residue());
    EXPECT_EQ(m.singular_points(), (std::vector<double>{-1.0, 2.0}));
}

TEST(WeylPsi, FreeGreenDiagonalIsM) {
    const cplx z(0.6, 0.8);
    EXPECT_NEAR(std::abs(green_function(kFree, kP3, z, 1, 1) - p3_closed_form(z)), 0.0, 1e-15);
    const auto psi = weyl_psi(kFree, kP3, z);
    const auto th = theta_fundamental(kFree, kP3, z);
    const auto ph = phi_fundamental(kFree, kP3, z);
    const cplx M = singular_M(kFree, kP3, z);
    for (Index n = 0; n <= 4; ++n) EXPECT_NEAR(std::abs(psi(n) - (th(n) + M * ph(n))), 0.0, 1e-14);
}

TEST(GreenFunction, AgreesWithDenseResolvent) {
    std::mt19937_64 rng(204);
    for (int trial = 0; trial < 20; ++trial) {
        const auto rw = oracle::random_window(rng, 1, 25);
        const auto& w = rw.window;
        const cplx z = oracle::random_z(rng);
        for (std::size_t j = 0; j < w.interior_size(); ++j) {
            const auto col = oracle::resolvent_column(rw.model, w, z, j);
            const Index m = w.first_interior() + static_cast<Index>(j);
            for (std::size_t i = 0; i < w.interior_size(); ++i) {
                const Index n = w.first_interior() + static_cast<Index>(i);
                const cplx g = green_function(rw.model, w, z, n, m);
                EXPECT_NEAR(std::abs(g - col[i]), 0.0, 1e-9 * std::max(std::abs(col[i]), 1e-3));
                EXPECT_EQ(g, green_function(rw.model, w, z, m, n));
            }
        }
    }
}

TEST(GreenFunction, DiagonalAndPsiAsymptotics) {
    std::mt19937_64 rng(205);
    const auto rw = oracle::random_window(rng, 12, 12);
    for (Index n = 1; n <= 5; ++n) {
        std::vector<double> d;
        for (double t : {1e2, 1e3, 1e4}) {
            const cplx z(0.0, t);
            EXPECT_LE(std::abs(green_function(rw.model, rw.window, z, n, n) + 1.0 / z), 10.0 / (t * t));
            const auto psi = weyl_psi(rw.model, rw.window, z);
            const auto phi = phi_fundamental(rw.model, rw.window, z, false);
            d.push_back(std::abs(psi(n) * z * phi(n) + 1.0));
        }
        EXPECT_LT(d[2], d[1]);
        EXPECT_LT(d[1], d[0]);
        EXPECT_LT(d[2], 1e-3);
    }
}

TEST(GreenFunction, DerivativeMatchesDifferenceQuotient) {
    std::mt19937_64 rng(206);
    const auto rw = oracle::random_window(rng, 8, 8);
    const cplx z(0.2, 0.9);
    const double h = 1e-4;
    const cplx fd = (green_function(rw.model, rw.window, z + h, 2, 4) - green_function(rw.model, rw.window, z - h, 2, 4)) /
                    (2.0 * h);
    EXPECT_NEAR(std::abs(green_function_derivative(rw.model, rw.window, z, 2, 4, 1) - fd), 0.0, 1e-7);
    EXPECT_NEAR(std::abs(green_function_derivative(rw.model, rw.window, z, 2, 4, 0) -
                         green_function(rw.model, rw.window, z, 2, 4)),
                0.0, 1e-12);
}

TEST(StieltjesInversion, FreeThreeSiteExamples) {
    const auto M = weyl_sampler(kFree, kP3);
    EXPECT_NEAR(stieltjes_inversion(M, -1.0, 1.0).value, 0.5, 1e-7);
    EXPECT_NEAR(stieltjes_inversion(M, 5.0, 6.0).value, 0.0, 1e-7);
    EXPECT_NEAR(stieltjes_inversion(M, 0.0, 1.0).value, 0.25, 1e-7);
    EXPECT_THROW(stieltjes_inversion(M, 1.0, 1.0), PreconditionError);
}

// Each raw value must match the arctan closed form of the pole/residue sum.
TEST(StieltjesInversion, RawValuesMatchArctanClosedForm) {
    std::mt19937_64 rng(207);
    for (int trial = 0; trial < 5; ++trial) {
        const auto rw = oracle::random_window(rng, 3, 10);
        const auto rho = spectral_measure(rw.model, rw.window);
        const auto M = pole_residue_form(rw.model, rw.window);
        const double x0 = rho.atoms.front().lambda - 0.3, x1 = rho.atoms.back().lambda - 0.01;
        const auto r = stieltjes_inversion(M, x0, x1);
        for (std::size_t i = 0; i < r.eps.size(); ++i) {
            double ref = 0.0;
            for (const auto& a : rho.atoms) ref += arctan_mass(a.lambda, a.weight, x0, x1, r.eps[i]);
            EXPECT_NEAR(r.raw[i], ref, 1e-10);
        }
    }
}

TEST(StieltjesInversion, RecoversEveryAtomWeight) {
    std::mt19937_64 rng(208);
    for (int trial = 0; trial < 6; ++trial) {
        const auto rw = oracle::random_window(rng, 2, 12);
        const auto rho = spectral_measure(rw.model, rw.window);
        const auto M = weyl_sampler(rw.model, rw.window);
        const auto& at = rho.atoms;
        for (std::size_t k = 0; k < at.size(); ++k) {
            const double lo = k == 0 ? at[k].lambda - 1.0 : 0.5 * (at[k - 1].lambda + at[k].lambda);
            const double hi = k + 1 == at.size() ? at[k].lambda + 1.0 : 0.5 * (at[k].lambda + at[k + 1].lambda);
            EXPECT_NEAR(stieltjes_inversion(M, lo, hi).value, at[k].weight, 1e-4);
        }
    }
}

TEST(Gauge, ConstantScalingOfWeights) {
    const auto rho = spectral_measure(kFree, kP3);
    const GaugeTransform tr{RealPolynomial{std::log(2.0)}, {}};
    const auto out = gauge_measure(tr, rho);
    EXPECT_NEAR(out.atoms[0].weight, 1.0 / 16.0, 1e-16);
    EXPECT_NEAR(out.atoms[1].weight, 1.0 / 8.0, 1e-16);
    EXPECT_NEAR(out.atoms[2].weight, 1.0 / 16.0, 1e-16);
    for (std::size_t k = 0; k < 3; ++k) EXPECT_EQ(out.atoms[k].lambda, rho.atoms[k].lambda);
    EXPECT_EQ(gauge_measure(GaugeTransform{}, rho), rho);
}

// The gauged M must equal -W(theta~, u+) / W(phi~, u+) computed from the gauged samples.
TEST(Gauge, GaugedSystemIsConsistent) {
    std::mt19937_64 rng(209);
    for (int trial = 0; trial < 10; ++trial) {
        const auto rw = oracle::random_window(rng, 3, 15);
        const auto& w = rw.window;
        const cplx z = oracle::random_z(rng);
        const GaugeTransform tr{RealPolynomial{0.3, -0.2, 0.05}, RealPolynomial{-1.0, 0.5}};
        const auto th = theta_fundamental(rw.model, w, z, false);
        const auto ph = phi_fundamental(rw.model, w, z, false);
        const auto M = weyl_sampler(rw.model, w);
        const auto rho = spectral_measure(rw.model, w);
        const auto gs = gauge_apply(tr, th, ph, M, rho);
        for (Index n = w.left(); n < w.right(); ++n) {
            const double scale = std::max(1.0, wronskian_scale(rw.model, gs.phi, gs.theta, n));
            EXPECT_LE(std::abs(wronskian(rw.model, gs.phi, gs.theta, n) - 1.0), 1e-10 * scale);
        }
        const auto up = u_plus(rw.model, w, z).sample;
        const Index L = w.left();
        const cplx direct = -wronskian(rw.model, gs.theta, up, L) / wronskian(rw.model, gs.phi, up, L);
        EXPECT_NEAR(std::abs(gs.M(z) - direct), 0.0, 1e-10 * std::abs(direct));
        for (std::size_t k = 0; k < rho.atoms.size(); ++k) {
            EXPECT_EQ(gs.rho.atoms[k].lambda, rho.atoms[k].lambda);
            EXPECT_NEAR(gs.rho.atoms[k].weight, rho.atoms[k].weight * std::exp(-2.0 * tr.g(rho.atoms[k].lambda)),
                        1e-15 * rho.atoms[k].weight + 1e-300);
        }
        EXPECT_EQ(gs.M.singular_points(), M.singular_points());
    }
}

TEST(HerglotzNormalize, Examples) {
    const auto rho = spectral_measure(kFree, kP3);
    const auto Mt = herglotz_normalize(rho, RealPolynomial{});
    const auto pr = pole_residue_form(kFree, kP3);
    EXPECT_EQ(Mt.pole_residue_data().poles, pr.pole_residue_data().poles);
    EXPECT_EQ(Mt.pole_residue_data().weights, pr.pole_residue_data().weights);
    double expect = 0.0;
    for (const auto& a : rho.atoms) expect += a.weight / (1.0 + a.lambda * a.lambda);
    EXPECT_NEAR(Mt(cplx(0.0, 1.0)).imag(), expect, 1e-15);
    EXPECT_GT(Mt(cplx(0.0, 1.0)).imag(), 0.0);
    const cplx z(0.3, 0.2);
    EXPECT_EQ(Mt(std::conj(z)), std::conj(Mt(z)));
    const auto Mg = herglotz_normalize(rho, RealPolynomial{0.0, 0.0, 1.0});
    EXPECT_GT(Mg(cplx(-0.4, 0.3)).imag(), 0.0);
}

TEST(IntegralRepresentation, Examples) {
    const auto rho = spectral_measure(kFree, kP3);
    const auto M = pole_residue_form(kFree, kP3);
    const std::vector<cplx> grid{cplx(0.5, 1.0), cplx(-2.0, 0.3), cplx(3.0, 0.0), cplx(0.0, 0.0), cplx(-0.7, -2.0)};
    const auto rep = integral_representation_residual(M, rho, EntireWeight::one(), grid);
    for (const auto& p : rep.points) {
        if (!p.skipped) {
            EXPECT_NEAR(std::abs(p.E), 0.0, 1e-15);
        }
    }
    EXPECT_TRUE(rep.points[3].skipped);
    EXPECT_EQ(rep.notes.size(), 1u);

    SpectralMeasure one;
    one.atoms = {{1.0, 1.0}};
    const auto rep1 = integral_representation_residual(WeylFunction::pole_residue(one), one, EntireWeight::one(),
                                                       {cplx(0.0, 1.0), cplx(2.5, 0.0), cplx(-1.0, 3.0)});
    for (const auto& p : rep1.points) EXPECT_NEAR(std::abs(p.E - 0.5), 0.0, 1e-15);
    EXPECT_LE(rep1.reality_defect, 1e-15);
    EXPECT_LE(rep1.symmetry_defect, 1e-15);
    EXPECT_LE(rep1.variation, 1e-15);
}

TEST(IntegralRepresentation, GenusWeightGivesRealEntireE) {
    std::mt19937_64 rng(210);
    const auto rw = oracle::random_window(rng, 6, 6);
    const auto rho = spectral_measure(rw.model, rw.window);
    const auto M = pole_residue_form(rw.model, rw.window);
    const auto gh = EntireWeight::for_genus(1);
    EXPECT_EQ(gh.power, 2);
    const auto rep = integral_representation_residual(M, rho, gh, {cplx(0.3, 0.4), cplx(-0.2, 0.1), cplx(0.05, 0.0)});
    EXPECT_LE(rep.symmetry_defect, 1e-12);
    EXPECT_LE(rep.reality_defect, 1e-12);
    EXPECT_EQ(EntireWeight::for_genus(0).power, 2);
    EXPECT_EQ(EntireWeight::for_genus(2).power, 4);
}

TEST(ClassifySupport, Examples) {
    const auto free_m = [](cplx z) { return free_half_line_m(z); };
    EXPECT_NEAR(free_half_line_m(cplx(0.0, 1e-12)).imag(), 1.0, 1e-11);
    const auto t = classify_support(free_m, {0.0, 3.0});
    EXPECT_EQ(t[0].tag, SupportTag::absolutely_continuous);
    EXPECT_EQ(t[1].tag, SupportTag::none);
    const auto M = weyl_sampler(kFree, kP3);
    const auto p = classify_support(M, {0.0});
    EXPECT_EQ(p[0].tag, SupportTag::point);
    EXPECT_NEAR(p[0].eps_im_last, 0.5, 1e-6);
}

TEST(FreeHalfLineM, SolvesQuadratic) {
    for (cplx z : {cplx(0.3, 0.5), cplx(-2.5, 0.01), cplx(4.0, 2.0)}) {
        const cplx m = free_half_line_m(z);
        EXPECT_NEAR(std::abs(m * m + z * m + 1.0), 0.0, 1e-14);
        EXPECT_GT(m.imag(), 0.0);
    }
}

#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "jweyl/debranges.hpp"
#include "oracles.hpp"

using namespace jweyl;

namespace {

const CoefficientModel kFree = CoefficientModel::free();
const LatticeWindow kP3(0, 4);

/// (1/pi) int F G / |E|^2 over the line, Boost 61-point Gauss-Kronrod, |E|^2 evaluated from the polynomials.
double gk61_inner(const RealPolynomial& F, const RealPolynomial& G, const RealPolynomial& phin,
                  const RealPolynomial& phin1, double an) {
    auto f = [&](double x) {
        const double p = phin(x), q = phin1(x);
        return F(x) * G(x) / (p * p + an * an * q * q);
    };
    const double inf = std::numeric_limits<double>::infinity();
    double err = 0.0;
    const double v = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, -inf, inf, 15, 1e-13, &err);
    return v / std::numbers::pi;
}

RealPolynomial random_poly(std::mt19937_64& rng, int degree) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> c(static_cast<std::size_t>(degree + 1));
    for (auto& x : c) x = u(rng);
    return RealPolynomial(c);
}

} // namespace

TEST(DeBrangesE, FreeThreeSiteExamples) {
    const DeBrangesSpace B(kFree, kP3, 2);
    for (cplx z : {cplx(0.3, 0.7), cplx(-2.0, 0.1), cplx(1.5, -1.0)})
        EXPECT_NEAR(std::abs(B.E(z) - (z - cplx(0.0, 1.0) * (z * z - 1.0))), 0.0, 1e-14);
    for (double x : {-2.0, -0.7, 0.0, 0.5, 3.0}) {
        EXPECT_NEAR(std::norm(B.E(x)), x * x * x * x - x * x + 1.0, 1e-13 * (1.0 + x * x * x * x));
        EXPECT_NEAR(B.weight(x) * (x * x * x * x - x * x + 1.0), 1.0, 1e-14);
        EXPECT_NEAR(B.E(x).imag(), -kFree.a(2) * (x * x - 1.0), 1e-14);
    }
    EXPECT_EQ(B.dimension(), 2);
}

TEST(DeBrangesE, HermiteBiehlerPropertyAndNoRealZeros) {
    std::mt19937_64 rng(601);
    for (int trial = 0; trial < 20; ++trial) {
        const auto rw = oracle::random_window(rng, 2, 20);
        const Index n = rw.window.first_interior() + static_cast<Index>(rw.window.interior_size() / 2);
        const DeBrangesSpace B(rw.model, rw.window, n);
        for (int k = 0; k < 10; ++k) {
            const cplx z = oracle::random_z(rng, 3.0, 0.05, 2.0);
            EXPECT_GT(std::abs(B.E(z)), std::abs(B.E(std::conj(z))));
            EXPECT_GT(std::abs(B.E(z.real())), 0.0);
        }
    }
}

TEST(Kernel, FreeThreeSiteExamples) {
    const DeBrangesSpace B(kFree, kP3, 2);
    for (cplx z : {cplx(0.3, 0.7), cplx(-2.0, 0.1)}) {
        for (cplx zeta : {cplx(1.0, -0.5), cplx(0.0, 2.0)})
            EXPECT_NEAR(std::abs(B.kernel(zeta, z) - (1.0 + std::conj(zeta) * z)), 0.0, 1e-14);
        EXPECT_NEAR(std::abs(B.kernel(0.0, z) - 1.0), 0.0, 1e-15);
        EXPECT_GE(B.kernel(z, z).real(), 0.0);
        EXPECT_NEAR(B.kernel(z, z).imag(), 0.0, 1e-15);
    }
    const auto K = B.kernel_section(0.5);
    EXPECT_NEAR(K(2.0), 2.0, 1e-15);
}

TEST(Kernel, ClosedFormIdentityOnRandomWindows) {
    std::mt19937_64 rng(602);
    for (int trial = 0; trial < 30; ++trial) {
        const auto rw = oracle::random_window(rng, 2, 20);
        std::uniform_int_distribution<Index> site(rw.window.first_interior(), rw.window.last_interior());
        const Index n = site(rng);
        const DeBrangesSpace B(rw.model, rw.window, n);
        for (int k = 0; k < 20; ++k) {
            const cplx zeta = oracle::random_z(rng, 2.0, -1.0, 1.0), z = oracle::random_z(rng, 2.0, -1.0, 1.0);
            const cplx K = B.kernel(zeta, z);
            EXPECT_NEAR(std::abs(B.kernel_from_E(zeta, z) - K), 0.0, 1e-10 * std::max(1.0, std::abs(K)));
            EXPECT_NEAR(std::abs(B.kernel(z, zeta) - std::conj(K)), 0.0, 1e-14 * std::max(1.0, std::abs(K)));
        }
    }
}

TEST(InnerProduct, FreeThreeSiteExamples) {
    const DeBrangesSpace B(kFree, kP3, 2);
    const RealPolynomial one{1.0}, lam{0.0, 1.0}, lam2{0.0, 0.0, 1.0};
    const RealPolynomial phi2{0.0, 1.0}, phi3{-1.0, 0.0, 1.0};
    EXPECT_NEAR(B.inner_product(one, one).real(), 1.0, 1e-12);
    EXPECT_NEAR(gk61_inner(one, one, phi2, phi3, 1.0), 1.0, 1e-12);
    EXPECT_NEAR(std::abs(B.inner_product(one, lam)), 0.0, 1e-13);
    EXPECT_NEAR(B.inner_product(lam, lam).real(), 1.0, 1e-12);
    EXPECT_NEAR(gk61_inner(lam, lam, phi2, phi3, 1.0), 1.0, 1e-12);
    EXPECT_THROW(B.inner_product(lam2, lam), DomainError);
    EXPECT_THROW(B.inner_product(lam2, one), DomainError);
}

// Library GK15 with mapped tails against Boost GK61 on the infinite interval.
TEST(InnerProduct, AgreesWithBoostQuadrature) {
    std::mt19937_64 rng(603);
    for (int trial = 0; trial < 10; ++trial) {
        const auto rw = oracle::random_window(rng, 2, 8);
        const Index n = rw.window.last_interior();
        const DeBrangesSpace B(rw.model, rw.window, n);
        const int d = B.dimension() - 1;
        const auto F = random_poly(rng, d), G = random_poly(rng, d);
        const double ref = gk61_inner(F, G, B.phi(n), B.phi(n + 1), rw.model.a(n));
        const cplx got = B.inner_product(F, G);
        EXPECT_NEAR(got.real(), ref, 1e-8 * std::max(1.0, std::abs(ref)));
        EXPECT_NEAR(got.imag(), 0.0, 1e-15);
        EXPECT_GT(B.norm2(F), 0.0);
    }
}

TEST(InnerProduct, ReproducingProperty) {
    std::mt19937_64 rng(604);
    std::uniform_real_distribution<double> uw(-2.0, 2.0);
    for (int trial = 0; trial < 10; ++trial) {
        const auto rw = oracle::random_window(rng, 2, 10);
        const Index n = rw.window.first_interior() + static_cast<Index>(rw.window.interior_size() / 2);
        const DeBrangesSpace B(rw.model, rw.window, n);
        const auto F = random_poly(rng, B.dimension() - 1);
        for (int k = 0; k < 3; ++k) {
            const double w = uw(rng);
            EXPECT_NEAR(std::abs(B.inner_product(B.kernel_section(w), F) - F(w)), 0.0, 1e-7 * std::max(1.0, std::abs(F(w))));
        }
    }
}

TEST(InnerProduct, PhiIsOrthonormal) {
    std::mt19937_64 rng(605);
    for (int trial = 0; trial < 8; ++trial) {
        const auto rw = oracle::random_window(rng, 2, 10);
        const Index n = rw.window.last_interior();
        const DeBrangesSpace B(rw.model, rw.window, n);
        for (Index m = rw.window.first_interior(); m <= n; ++m)
            for (Index k = rw.window.first_interior(); k <= m; ++k)
                EXPECT_NEAR(std::abs(B.inner_product(B.phi(m), B.phi(k)) - (m == k ? 1.0 : 0.0)), 0.0, 1e-7);
    }
}

TEST(Embedding, FreeThreeSiteExamples) {
    const auto rho = spectral_measure(kFree, kP3);
    const DeBrangesSpace B2(kFree, kP3, 2), B3(kFree, kP3, 3);
    const auto e1 = embedding_check(B2, RealPolynomial{1.0}, rho);
    EXPECT_NEAR(e1.b_norm2, 1.0, 1e-12);
    EXPECT_NEAR(e1.l2_norm2, 1.0, 1e-14);
    const auto e2 = embedding_check(B2, RealPolynomial{0.0, 1.0}, rho);
    EXPECT_NEAR(e2.b_norm2, 1.0, 1e-12);
    EXPECT_NEAR(e2.l2_norm2, 1.0, 1e-14);
    const auto e3 = embedding_check(B3, RealPolynomial{0.0, 0.0, 1.0}, rho);
    EXPECT_NEAR(e3.b_norm2, 2.0, 1e-12);
    EXPECT_NEAR(e3.l2_norm2, 2.0, 1e-14);
    EXPECT_LE(e3.residual, 1e-12);
}

TEST(Embedding, BasisAtEveryInteriorSite) {
    std::mt19937_64 rng(606);
    for (int trial = 0; trial < 5; ++trial) {
        const auto rw = oracle::random_window(rng, 2, 8);
        const auto rho = spectral_measure(rw.model, rw.window);
        for (Index n = rw.window.first_interior(); n <= rw.window.last_interior(); ++n) {
            const DeBrangesSpace B(rw.model, rw.window, n);
            for (Index m = rw.window.first_interior(); m <= n; ++m)
                EXPECT_LE(embedding_check(B, B.phi(m), rho).residual, 1e-8) << "n " << n << " m " << m;
        }
    }
}

TEST(ChainInclusion, FreeThreeSite) {
    const auto rep = chain_inclusion_check(kFree, kP3, 2);
    EXPECT_EQ(rep.dim_n, 2);
    EXPECT_EQ(rep.dim_next, 3);
    EXPECT_TRUE(rep.holds);
    EXPECT_EQ(rep.complement.degree(), 2);
    EXPECT_NEAR(rep.complement.coefficient(2), 1.0, 1e-15);
    EXPECT_NEAR(rep.complement.coefficient(1), 0.0, 1e-15);
    EXPECT_NEAR(rep.complement.coefficient(0), -1.0, 1e-15);
    EXPECT_LE(rep.gram_mismatch, 1e-8);
    EXPECT_LE(rep.complement_overlap, 1e-8);

    const DeBrangesSpace first(kFree, kP3, 1);
    EXPECT_EQ(first.dimension(), 1);
    EXPECT_NEAR(first.norm2(RealPolynomial{1.0}), 1.0, 1e-12);
    EXPECT_THROW(first.inner_product(RealPolynomial{0.0, 1.0}, RealPolynomial{1.0}), DomainError);
    EXPECT_THROW(chain_inclusion_check(kFree, kP3, 3), DomainError);
}

TEST(ChainInclusion, RandomWindows) {
    std::mt19937_64 rng(607);
    for (int trial = 0; trial < 5; ++trial) {
        const auto rw = oracle::random_window(rng, 3, 8);
        for (Index n = rw.window.first_interior(); n < rw.window.last_interior(); ++n) {
            const auto rep = chain_inclusion_check(rw.model, rw.window, n);
            EXPECT_TRUE(rep.holds) << "n " << n << " gram " << rep.gram_mismatch << " kernel " << rep.kernel_mismatch;
            EXPECT_EQ(rep.dim_next, rep.dim_n + 1);
        }
    }
}

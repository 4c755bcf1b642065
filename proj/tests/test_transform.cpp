#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "jweyl/transform.hpp"
#include "oracles.hpp"

using namespace jweyl;

namespace {

const CoefficientModel kFree = CoefficientModel::free();
const LatticeWindow kP3(0, 4);
const double kSqrt2 = std::sqrt(2.0);

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n) {
    std::normal_distribution<double> g;
    std::vector<double> v(n);
    for (auto& x : v) x = g(rng);
    return v;
}

// Unit eigenvector projections <v_k, f>, signed so that sqrt(w_k) f^_k should match.
std::vector<double> oracle_projections(const oracle::DenseEigen& e, const std::vector<double>& f) {
    std::vector<double> out;
    for (const auto& v : e.vectors) {
        double s = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i) s += v[i] * f[i];
        out.push_back(std::copysign(1.0, v[0]) * s);
    }
    return out;
}

} // namespace

TEST(ForwardTransform, FreeThreeSiteExamples) {
    const auto d2 = forward_transform(kFree, kP3, std::vector<double>{0.0, 1.0, 0.0});
    EXPECT_NEAR(d2[0], -kSqrt2, 1e-15);
    EXPECT_NEAR(d2[1], 0.0, 1e-15);
    EXPECT_NEAR(d2[2], kSqrt2, 1e-15);
    EXPECT_EQ(forward_transform(kFree, kP3, std::vector<double>(3, 0.0)), std::vector<double>(3, 0.0));
    const auto d1 = forward_transform(kFree, kP3, std::vector<double>{1.0, 0.0, 0.0});
    for (double x : d1) EXPECT_EQ(x, 1.0);
    EXPECT_NEAR(SpectralTransform(kFree, kP3).spectral_norm2(d1), 1.0, 1e-15);
    EXPECT_THROW(forward_transform(kFree, kP3, std::vector<double>{1.0}), DomainError);
}

TEST(InverseTransform, FreeThreeSiteExamples) {
    const auto d2 = inverse_transform(kFree, kP3, std::vector<double>{-kSqrt2, 0.0, kSqrt2});
    EXPECT_NEAR(d2[0], 0.0, 1e-12);
    EXPECT_NEAR(d2[1], 1.0, 1e-12);
    EXPECT_NEAR(d2[2], 0.0, 1e-12);
    EXPECT_EQ(inverse_transform(kFree, kP3, std::vector<double>(3, 0.0)), std::vector<double>(3, 0.0));
    // lambda * 1 is the transform of H delta_1 = (b(1), a(1), 0)
    const auto lam = inverse_transform(kFree, kP3, std::vector<double>{-kSqrt2, 0.0, kSqrt2});
    const auto h = apply_window_operator(kFree, kP3, std::vector<double>{1.0, 0.0, 0.0});
    for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(lam[i], h[i], 1e-12);
}

TEST(ForwardTransform, AgreesWithDenseEigenvectorOracle) {
    std::mt19937_64 rng(301);
    for (int trial = 0; trial < 40; ++trial) {
        const auto rw = oracle::random_window(rng, 1, 25);
        const auto e = oracle::jacobi_eigen(oracle::dense_window(rw.model, rw.window));
        const auto f = random_vector(rng, rw.window.interior_size());
        const SpectralTransform U(rw.model, rw.window);
        const auto got = U.forward(f);
        const auto ref = oracle_projections(e, f);
        const double fn = std::sqrt(norm2(f));
        for (std::size_t k = 0; k < ref.size(); ++k) {
            EXPECT_NEAR(U.measure().atoms[k].lambda, e.values[k], 1e-12);
            EXPECT_NEAR(std::sqrt(U.measure().atoms[k].weight) * got[k], ref[k], 1e-10 * fn);
        }
    }
}

TEST(Unitarity, ParsevalBothDirectionsAndRoundTrip) {
    std::mt19937_64 rng(302);
    for (int trial = 0; trial < 60; ++trial) {
        const auto rw = oracle::random_window(rng, 1, 40);
        const SpectralTransform U(rw.model, rw.window);
        const auto f = random_vector(rng, U.size());
        const auto fh = U.forward(f);
        EXPECT_NEAR(U.spectral_norm2(fh), norm2(f), 1e-10 * norm2(f));
        const auto back = U.inverse(fh);
        std::vector<double> d(f.size());
        for (std::size_t i = 0; i < f.size(); ++i) d[i] = back[i] - f[i];
        EXPECT_LE(std::sqrt(norm2(d) / norm2(f)), 1e-10);

        // spectral side first
        const auto gh = random_vector(rng, U.size());
        const auto g = U.inverse(gh);
        EXPECT_NEAR(norm2(g), U.spectral_norm2(gh), 1e-10 * U.spectral_norm2(gh));
    }
}

TEST(Unitarity, ComplexVectors) {
    std::mt19937_64 rng(303);
    const auto rw = oracle::random_window(rng, 20, 20);
    const SpectralTransform U(rw.model, rw.window);
    const auto re = random_vector(rng, U.size()), im = random_vector(rng, U.size());
    std::vector<cplx> f(U.size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = {re[i], im[i]};
    const auto fh = U.forward(f);
    EXPECT_NEAR(U.spectral_norm2(fh), norm2(f), 1e-10 * norm2(f));
    const auto back = U.inverse(fh);
    for (std::size_t i = 0; i < f.size(); ++i) EXPECT_NEAR(std::abs(back[i] - f[i]), 0.0, 1e-10 * std::sqrt(norm2(f)));
}

TEST(Diagonalization, ForwardOfHfIsLambdaTimesForward) {
    std::mt19937_64 rng(304);
    for (int trial = 0; trial < 40; ++trial) {
        const auto rw = oracle::random_window(rng, 1, 30);
        const SpectralTransform U(rw.model, rw.window);
        const auto f = random_vector(rng, U.size());
        const auto lhs = U.forward(apply_window_operator(rw.model, rw.window, f));
        const auto fh = U.forward(f);
        // relative to the L2(rho) norm of the right-hand side
        std::vector<double> d(U.size()), rhs(U.size());
        for (std::size_t k = 0; k < U.size(); ++k) {
            rhs[k] = U.measure().atoms[k].lambda * fh[k];
            d[k] = lhs[k] - rhs[k];
        }
        EXPECT_LE(std::sqrt(U.spectral_norm2(d)), 1e-10 * std::max(1.0, std::sqrt(U.spectral_norm2(rhs))));
    }
}

TEST(GreenTransform, LibraryDefectIsSmall) {
    std::mt19937_64 rng(305);
    for (int trial = 0; trial < 20; ++trial) {
        const auto rw = oracle::random_window(rng, 1, 20);
        const cplx z = oracle::random_z(rng);
        for (Index n = rw.window.first_interior(); n <= rw.window.last_interior(); ++n) {
            EXPECT_LE(green_transform_defect(rw.model, rw.window, z, n, 0), 1e-9);
            EXPECT_LE(green_transform_defect(rw.model, rw.window, z, n, 1), 1e-9);
        }
    }
}

// Transform of a dense resolvent row, and of its central difference in z.
TEST(GreenTransform, DenseResolventOracle) {
    std::mt19937_64 rng(306);
    for (int trial = 0; trial < 15; ++trial) {
        const auto rw = oracle::random_window(rng, 2, 15);
        const SpectralTransform U(rw.model, rw.window);
        const cplx z = oracle::random_z(rng, 2.0, 0.5, 2.0);
        const double h = 1e-4;
        for (std::size_t i = 0; i < U.size(); ++i) {
            const auto g = oracle::resolvent_column(rw.model, rw.window, z, i);
            const auto gp = oracle::resolvent_column(rw.model, rw.window, z + h, i);
            const auto gm = oracle::resolvent_column(rw.model, rw.window, z - h, i);
            std::vector<cplx> dg(g.size());
            for (std::size_t m = 0; m < g.size(); ++m) dg[m] = (gp[m] - gm[m]) / (2.0 * h);
            const auto gh = U.forward(g);
            const auto dgh = U.forward(dg);
            for (std::size_t k = 0; k < U.size(); ++k) {
                const double lambda = U.measure().atoms[k].lambda;
                const cplx e0 = U.phi(k, i) / (lambda - z);
                const cplx e1 = U.phi(k, i) / ((lambda - z) * (lambda - z));
                EXPECT_NEAR(std::abs(gh[k] - e0), 0.0, 1e-9 * std::max(1.0, std::abs(e0)));
                EXPECT_NEAR(std::abs(dgh[k] - e1), 0.0, 1e-6 * std::max(1.0, std::abs(e1)));
            }
        }
    }
}

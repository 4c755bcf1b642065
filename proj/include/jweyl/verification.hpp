#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "jweyl/debranges.hpp"
#include "jweyl/inverse.hpp"
#include "jweyl/krein.hpp"
#include "jweyl/spectra.hpp"
#include "jweyl/transform.hpp"
#include "jweyl/weyl.hpp"

namespace jweyl::acceptance {

// Pinned tolerances.
inline constexpr double kWronskianTol = 1e-10;
inline constexpr double kTransformTol = 1e-10;
inline constexpr double kMassTol = 1e-12;
inline constexpr double kInversionTol = 1e-4;
inline constexpr double kAsymptoticSlopeTol = 0.02;
inline constexpr double kKreinTol = 1e-12;
inline constexpr double kReconstructionTol = 1e-8;
inline constexpr double kBmPerturbedMax = -11.0 + 0.3;
inline constexpr double kBmControlMin = -3.3;
inline constexpr double kKernelTol = 1e-10;
inline constexpr double kQuadratureTol = 1e-7;
inline constexpr double kHlDisplacement = 1e-3;
inline constexpr double kGaugeTol = 1e-12;

struct Options {
    std::uint64_t seed = 20240611;
    std::size_t corpus_size = 100;
    Index corpus_max_sites = 30;
    std::size_t reconstruction_windows = 20;
    Index reconstruction_max_sites = 50;
    std::size_t hl_trials = 1000;
};

struct CriterionResult {
    int id = 0;
    std::string title;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

struct Fixture {
    CoefficientModel model;
    LatticeWindow window;
};

/// Random table model on [0, N+1] with N interior sites, a in [0.5, 2], b in [-1, 1].
inline Fixture random_fixture(std::mt19937_64& rng, Index min_sites, Index max_sites) {
    std::uniform_int_distribution<Index> size(min_sites, max_sites);
    std::uniform_real_distribution<double> ua(0.5, 2.0), ub(-1.0, 1.0);
    const Index N = size(rng);
    std::vector<double> a(static_cast<std::size_t>(N + 2)), b(static_cast<std::size_t>(N + 2));
    for (auto& x : a) x = ua(rng);
    for (auto& x : b) x = ub(rng);
    return {CoefficientModel::table(0, std::move(a), std::move(b)), LatticeWindow(0, N + 1)};
}

inline std::vector<Fixture> corpus(const Options& o) {
    std::mt19937_64 rng(o.seed);
    std::vector<Fixture> out;
    for (std::size_t i = 0; i < o.corpus_size; ++i) out.push_back(random_fixture(rng, 1, o.corpus_max_sites));
    return out;
}

inline Fixture free_p3() { return {CoefficientModel::free(), LatticeWindow(0, 4)}; }

inline std::string fmt(const char* f, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

inline std::string sci(double x) { return fmt("%.3e", x); }

// ---------------------------------------------------------------------------

/// 1. W(theta, phi) = 1 and Wronskian constancy on the corpus.
inline CriterionResult criterion_1(const Options& o) {
    CriterionResult r{1, "fundamental system: W(theta,phi)=1 and Wronskian constancy", false, {}, 0.0};
    std::mt19937_64 rng(o.seed + 1);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    double norm_defect = 0.0, flipped_defect = 0.0, const_defect = 0.0, w_value = 0.0;
    for (const auto& f : corpus(o)) {
        const cplx z(u(rng), u(rng));
        const auto th = theta_fundamental(f.model, f.window, z, false);
        const auto ph = phi_fundamental(f.model, f.window, z, false);
        double scale = 0.0;
        for (Index n = f.window.left(); n < f.window.right(); ++n) {
            const cplx w = wronskian(f.model, th, ph, n);
            scale = std::max({scale, 1.0, wronskian_scale(f.model, th, ph, n)});
            if (n == f.window.left()) w_value = w.real();
            norm_defect = std::max(norm_defect, std::abs(w - 1.0) / scale);
            flipped_defect = std::max(flipped_defect, std::abs(w + 1.0) / scale);
        }
        const_defect = std::max(const_defect, wronskian_variation(f.model, th, ph));
        // random solution pair
        const auto s1 = solve_recurrence(f.model, z, f.window.left(), cplx(u(rng), u(rng)), cplx(u(rng), u(rng)),
                                         f.window, false);
        const auto s2 = solve_recurrence(f.model, z, f.window.left(), cplx(u(rng), u(rng)), cplx(u(rng), u(rng)),
                                         f.window, false);
        const_defect = std::max(const_defect, wronskian_variation(f.model, s1, s2));
    }
    const bool constancy = const_defect <= kWronskianTol;
    const bool normalization = norm_defect <= kWronskianTol;
    r.passed = constancy && normalization;
    r.detail = "constancy " + sci(const_defect) + (constancy ? " ok" : " FAIL") + "; W(theta,phi) = " +
               fmt("%.15g", w_value) + " (max |W-1| " + sci(norm_defect) + ")" +
               (normalization ? "" : " -- theta is normalized so that W(phi,theta) = 1 (max |W(phi,theta)-1| " + sci(flipped_defect) +
                                   "), which keeps M Herglotz and G(z,n,n) = phi psi");
    return r;
}

/// 2. Parseval, round trip and diagonalization on the corpus.
inline CriterionResult criterion_2(const Options& o) {
    CriterionResult r{2, "spectral transform: Parseval, round trip, diagonalization", false, {}, 0.0};
    std::mt19937_64 rng(o.seed + 2);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double parseval = 0.0, roundtrip = 0.0, diag = 0.0;
    for (const auto& f : corpus(o)) {
        const SpectralTransform U(f.model, f.window);
        std::vector<double> v(U.size()), vh(U.size());
        for (auto& x : v) x = u(rng);
        for (auto& x : vh) x = u(rng);
        const auto fh = U.forward(v);
        parseval = std::max(parseval, std::abs(norm2(v) - U.spectral_norm2(fh)) / std::max(1.0, norm2(v)));
        const auto back = U.inverse(fh);
        for (std::size_t i = 0; i < v.size(); ++i) roundtrip = std::max(roundtrip, std::abs(back[i] - v[i]));
        // spectral side first
        const auto g = U.inverse(vh);
        parseval = std::max(parseval, std::abs(norm2(g) - U.spectral_norm2(vh)) / std::max(1.0, norm2(g)));
        const auto gh = U.forward(g);
        std::vector<double> dh(vh.size());
        for (std::size_t k = 0; k < vh.size(); ++k) dh[k] = gh[k] - vh[k];
        roundtrip = std::max(roundtrip, std::sqrt(U.spectral_norm2(dh) / U.spectral_norm2(vh)));
        const auto Hv = U.forward(apply_window_operator(f.model, f.window, v));
        for (std::size_t k = 0; k < U.size(); ++k)
            diag = std::max(diag, std::abs(Hv[k] - U.measure().atoms[k].lambda * fh[k]) / std::max(1.0, std::abs(Hv[k])));
    }
    r.passed = parseval <= kTransformTol && roundtrip <= kTransformTol && diag <= kTransformTol;
    r.detail = "parseval " + sci(parseval) + ", round trip " + sci(roundtrip) + ", diagonalization " + sci(diag);
    return r;
}

/// 3. Total mass, Stieltjes inversion of the free 3-site measure, endpoint half-counting.
inline CriterionResult criterion_3(const Options& o) {
    CriterionResult r{3, "measure identities: mass, Stieltjes inversion, endpoint half-count", false, {}, 0.0};
    double mass = 0.0;
    for (const auto& f : corpus(o)) mass = std::max(mass, std::abs(spectral_measure(f.model, f.window).total_mass() - 1.0));
    const auto p3 = free_p3();
    const WeylFunction M = weyl_sampler(p3.model, p3.window);
    const double s2 = std::sqrt(2.0);
    const std::vector<std::pair<double, double>> atoms{{-s2, 0.25}, {0.0, 0.5}, {s2, 0.25}};
    double inv = 0.0;
    for (const auto& [x, w] : atoms) inv = std::max(inv, std::abs(stieltjes_inversion(M, x - 0.5, x + 0.5).value - w));
    const double endpoint = stieltjes_inversion(M, 0.0, 1.0).value;
    const double end_err = std::abs(endpoint - 0.25);
    r.passed = mass <= kMassTol && inv <= kInversionTol && end_err <= kInversionTol;
    r.detail = "mass " + sci(mass) + ", atom weights " + sci(inv) + ", (0,1) -> " + fmt("%.10f", endpoint);
    return r;
}

/// 4. Asymptotics along z = it, t in [10, 1e4].
inline CriterionResult criterion_4(const Options& o) {
    CriterionResult r{4, "asymptotics: M + theta/phi bound, m- and G ~ -1/z", false, {}, 0.0};
    const auto ts = log_spaced(10.0, 1e4, 16);
    double growth = 0.0, worst_slope = 0.0, phase = 0.0;
    for (const auto& f : corpus(o)) {
        const auto& w = f.window;
        for (Index n = w.first_interior(); n <= std::min<Index>(5, w.last_interior()); ++n) {
            std::vector<double> q, lt, lm, lg;
            for (double t : ts) {
                const cplx z(0.0, t);
                const auto phi = phi_fundamental(f.model, w, z, false);
                const auto psi = weyl_psi(f.model, w, z);
                // M + theta/phi = psi/phi
                q.push_back(std::abs(psi(n) / phi(n)) * t * std::norm(phi(n)));
                lt.push_back(std::log(t));
                lg.push_back(std::log(std::abs(green_function(f.model, w, z, n, n))));
                if (n >= w.left() + 2) {
                    const cplx m = m_half_line(f.model, w, z, Side::left, n);
                    lm.push_back(std::log(std::abs(m)));
                    phase = std::max(phase, std::abs(m * z + 1.0) * (t >= 1e3 ? 1.0 : 0.0));
                }
            }
            const double early = *std::max_element(q.begin(), q.begin() + 5);
            const double late = *std::max_element(q.end() - 5, q.end());
            growth = std::max(growth, late / early);
            worst_slope = std::max(worst_slope, std::abs(detail::least_squares_line(lt, lg).slope + 1.0));
            if (!lm.empty()) worst_slope = std::max(worst_slope, std::abs(detail::least_squares_line(lt, lm).slope + 1.0));
        }
    }
    // bounded: the late values do not exceed twice the early ones
    r.passed = growth <= 2.0 && worst_slope <= kAsymptoticSlopeTol;
    r.detail = "late/early bound ratio " + fmt("%.4f", growth) + ", max |slope + 1| " + sci(worst_slope) +
               ", max |z m- + 1| at t>=1e3 " + sci(phase);
    return r;
}

/// 5. Krein product identity on the corpus; phi from the spectra of the free 3-site fixture.
inline CriterionResult criterion_5(const Options& o) {
    CriterionResult r{5, "Krein product identity and phi from two spectra", false, {}, 0.0};
    std::mt19937_64 rng(o.seed + 5);
    std::uniform_real_distribution<double> ux(-3.0, 3.0), uy(0.5, 2.0);
    double worst = 0.0;
    std::size_t checked = 0;
    for (const auto& f : corpus(o)) {
        const auto& w = f.window;
        if (w.interior_size() < 2) continue;
        for (Index n : {w.right(), w.first_interior() + 1 + static_cast<Index>(w.interior_size()) / 2}) {
            if (n > w.right()) continue;
            std::vector<cplx> zs;
            for (int i = 0; i < 21; ++i) zs.emplace_back(ux(rng), uy(rng));
            const auto spectra = krein_spectra(f.model, w, n);
            const auto samples = m_minus_samples(f.model, w, n, zs);
            const auto rep = krein_fit(spectra, {samples.front()}, 1.0);
            for (std::size_t i = 1; i < samples.size(); ++i)
                worst = std::max(worst, std::abs(rep(samples[i].first) - samples[i].second) / std::abs(samples[i].second));
            ++checked;
        }
    }
    const auto p3 = free_p3();
    const auto rep = krein_fit(krein_spectra(p3.model, p3.window, 3),
                               m_minus_samples(p3.model, p3.window, 3, {cplx(0.3, 1.0), cplx(-1.0, 2.0)}));
    const auto pc = construct_phi_from_spectra(rep, 0, p3.model.a(2));
    const auto prop = detect_proportionality(pc, p3.model, p3.window, 3, {cplx(0.3, 1.0), cplx(2.0, 1.0), cplx(-0.7, 0.2)});
    const bool pm1 = prop.constant && std::abs(std::abs(prop.constant->real()) - 1.0) <= 1e-12 &&
                     std::abs(prop.constant->imag()) <= 1e-12;
    r.passed = worst <= kKreinTol && pm1;
    r.detail = std::to_string(checked) + " (window, site) pairs, max relative mismatch " + sci(worst) +
               "; P3 constant " + (prop.constant ? fmt("%.15g", prop.constant->real()) : std::string("none"));
    return r;
}

/// 6. operator -> measure -> operator on random windows up to 50 sites.
inline CriterionResult criterion_6(const Options& o) {
    CriterionResult r{6, "reconstruction round trip", false, {}, 0.0};
    std::mt19937_64 rng(o.seed + 6);
    double worst = 0.0;
    for (std::size_t i = 0; i < o.reconstruction_windows; ++i) {
        const Fixture f = i == 0 ? random_fixture(rng, o.reconstruction_max_sites, o.reconstruction_max_sites)
                                 : random_fixture(rng, 1, o.reconstruction_max_sites);
        const auto& w = f.window;
        const auto rec = reconstruct_from_measure(spectral_measure(f.model, w), w.interior_size());
        for (std::size_t k = 0; k < rec.b.size(); ++k) {
            const double b = f.model.b(w.first_interior() + static_cast<Index>(k));
            worst = std::max(worst, std::abs(rec.b[k] - b) / std::max(1.0, std::abs(b)));
        }
        for (std::size_t k = 0; k < rec.a.size(); ++k) {
            const double a = f.model.a(w.first_interior() + static_cast<Index>(k));
            worst = std::max(worst, std::abs(rec.a[k] - a) / a);
        }
    }
    r.passed = worst <= kReconstructionTol;
    r.detail = "max relative coefficient error " + sci(worst);
    return r;
}

/// 7. Borg-Marchenko decay rates on the free 10-site fixture.
inline CriterionResult criterion_7(const Options&) {
    CriterionResult r{7, "Borg-Marchenko rates", false, {}, 0.0};
    const LatticeWindow w(0, 9);
    const auto h0 = CoefficientModel::free().tabulate(w);
    const std::vector<double> imag_axis{std::numbers::pi / 2};
    const auto pert = borg_marchenko_rate(h0, h0.with_b(6, 1.0), w, 5, imag_axis);
    const auto ctrl = borg_marchenko_rate(h0, h0.with_b(1, 1.0), w, 5, imag_axis);
    r.passed = pert.slopes[0] <= kBmPerturbedMax && ctrl.slopes[0] >= kBmControlMin && pert.consistent && !ctrl.consistent;
    r.detail = "b(6) slope " + fmt("%.4f", pert.slopes[0]) + " (" + pert.verdict + "), b(1) slope " +
               fmt("%.4f", ctrl.slopes[0]) + " (" + ctrl.verdict + ")";
    return r;
}

/// 8. de Branges suite.
inline CriterionResult criterion_8(const Options& o) {
    CriterionResult r{8, "de Branges: kernel identity, reproducing, unitarity, embedding, integrals", false, {}, 0.0};
    std::mt19937_64 rng(o.seed + 8);
    std::uniform_real_distribution<double> u(-2.0, 2.0), uy(0.2, 2.0);
    double kernel = 0.0;
    for (int i = 0; i < 10; ++i) {
        const Fixture f = random_fixture(rng, 2, 20);
        const auto& w = f.window;
        std::uniform_int_distribution<Index> site(w.first_interior(), w.last_interior());
        const DeBrangesSpace B(f.model, w, site(rng));
        for (int k = 0; k < 20; ++k) {
            const cplx zeta(u(rng), uy(rng) * (k % 2 ? 1.0 : -1.0)), z(u(rng), uy(rng));
            const cplx K = B.kernel(zeta, z);
            kernel = std::max(kernel, std::abs(K - B.kernel_from_E(zeta, z)) / std::max(1.0, std::abs(K)));
        }
    }
    double reproducing = 0.0, unitarity = 0.0, embedding = 0.0;
    for (int i = 0; i < 3; ++i) {
        const Fixture f = random_fixture(rng, 3, 8);
        const auto& w = f.window;
        const SpectralMeasure rho = spectral_measure(f.model, w);
        for (Index n = w.first_interior(); n <= w.last_interior(); ++n) {
            const DeBrangesSpace B(f.model, w, n);
            for (Index m = w.first_interior(); m <= n; ++m) {
                for (Index k = w.first_interior(); k <= m; ++k)
                    unitarity = std::max(unitarity, std::abs(B.inner_product(B.phi(m), B.phi(k)) - (m == k ? 1.0 : 0.0)));
                embedding = std::max(embedding, embedding_check(B, B.phi(m), rho).residual);
            }
            const double x = u(rng);
            RealPolynomial F;
            for (Index m = w.first_interior(); m <= n; ++m) F = F + u(rng) * B.phi(m);
            reproducing = std::max(reproducing, std::abs(B.inner_product(B.kernel_section(x), F) - F(x)));
        }
    }
    const auto p3 = free_p3();
    const DeBrangesSpace B2(p3.model, p3.window, 2), B3(p3.model, p3.window, 3);
    const RealPolynomial one{1.0}, lam{0.0, 1.0}, lam2{0.0, 0.0, 1.0};
    const double i1 = std::abs(B2.inner_product(one, one) - 1.0);
    const double i2 = std::abs(B2.inner_product(lam, lam) - 1.0);
    const double i3 = std::abs(B3.inner_product(lam2, lam2) - 2.0);
    const double integrals = std::max({i1, i2, i3});
    r.passed = kernel < kKernelTol && reproducing <= kQuadratureTol && unitarity <= kQuadratureTol &&
               embedding <= kQuadratureTol && integrals <= kQuadratureTol;
    r.detail = "kernel " + sci(kernel) + ", reproducing " + sci(reproducing) + ", unitarity " + sci(unitarity) +
               ", embedding " + sci(embedding) + ", P3 integrals " + sci(integrals);
    return r;
}

/// 9. Hochstadt-Liebermann rigidity on the free 3-site fixture.
inline CriterionResult criterion_9(const Options& o) {
    CriterionResult r{9, "Hochstadt-Liebermann rigidity", false, {}, 0.0};
    const auto p3 = free_p3();
    const auto rep = hochstadt_liebermann_probe(p3.model, p3.window, 3, o.hl_trials, o.seed + 9);
    r.passed = rep.min_displacement > kHlDisplacement && rep.ratio_vanishes;
    r.detail = std::to_string(rep.trials) + " trials, min displacement " + sci(rep.min_displacement) +
               ", chi/phi slope " + fmt("%.3f", rep.ratio_slope);
    return r;
}

/// 10. Constant gauge: weights scale by e^{-2g}, poles fixed.
inline CriterionResult criterion_10(const Options& o) {
    CriterionResult r{10, "gauge covariance", false, {}, 0.0};
    std::mt19937_64 rng(o.seed + 10);
    std::uniform_real_distribution<double> ug(-1.0, 1.0);
    double weight_err = 0.0, pole_err = 0.0;
    auto check = [&](const Fixture& f, double g) {
        const GaugeTransform tr{RealPolynomial::constant(g), {}};
        const SpectralMeasure rho = spectral_measure(f.model, f.window);
        const WeylFunction M = pole_residue_form(f.model, f.window);
        const cplx z(0.1, 1.0);
        const auto sys = gauge_apply(tr, theta_fundamental(f.model, f.window, z, false),
                                     phi_fundamental(f.model, f.window, z, false), M, rho);
        const auto& pr = sys.M.pole_residue_data();
        const double s = std::exp(-2.0 * g);
        for (std::size_t k = 0; k < rho.atoms.size(); ++k) {
            weight_err = std::max(weight_err, std::abs(sys.rho.atoms[k].weight - s * rho.atoms[k].weight) / (s * rho.atoms[k].weight));
            weight_err = std::max(weight_err, std::abs(pr.weights[k] - s * rho.atoms[k].weight) / (s * rho.atoms[k].weight));
            pole_err = std::max({pole_err, std::abs(pr.poles[k] - rho.atoms[k].lambda),
                                 std::abs(sys.rho.atoms[k].lambda - rho.atoms[k].lambda)});
        }
    };
    check(free_p3(), std::log(2.0));
    for (const auto& f : corpus(o)) check(f, ug(rng));
    r.passed = weight_err <= kGaugeTol && pole_err == 0.0;
    r.detail = "max relative weight error " + sci(weight_err) + ", pole movement " + sci(pole_err);
    return r;
}

inline std::vector<CriterionResult> run_all(const Options& o = {}) {
    const std::vector<std::function<CriterionResult(const Options&)>> all{
        criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
        criterion_6, criterion_7, criterion_8, criterion_9, criterion_10};
    std::vector<CriterionResult> out;
    for (std::size_t i = 0; i < all.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        CriterionResult r;
        try {
            r = all[i](o);
        } catch (const std::exception& e) {
            r.id = static_cast<int>(i + 1);
            r.title = "criterion " + std::to_string(i + 1);
            r.passed = false;
            r.detail = std::string("exception: ") + e.what();
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        out.push_back(std::move(r));
    }
    return out;
}

/// Runtime limits: criterion 1 under 10 s, criterion 6 under 30 s.
inline void apply_runtime_limits(std::vector<CriterionResult>& results) {
    for (auto& r : results) {
        const double limit = r.id == 1 ? 10.0 : (r.id == 6 ? 30.0 : 0.0);
        if (limit > 0.0 && r.seconds >= limit) {
            r.passed = false;
            r.detail += "; runtime " + fmt("%.2f", r.seconds) + " s exceeds " + fmt("%.0f", limit) + " s";
        }
    }
}

} // namespace jweyl::acceptance

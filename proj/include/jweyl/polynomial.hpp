#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <type_traits>
#include <vector>

namespace jweyl {

/**
 * Dense polynomial with coefficients stored in ascending order,
 * p(x) = c[0] + c[1] x + ... + c[d] x^d.
 *
 * Used for the entire solutions phi(., n), theta(., n) of a truncated lattice
 * (which are polynomials in the spectral parameter), for gauge functions and
 * for elements of the de Branges spaces B(n).
 */
template <typename T>
class Polynomial {
public:
    using value_type = T;

    Polynomial() = default;
    Polynomial(std::initializer_list<T> c) : coeffs_(c) { trim(); }
    explicit Polynomial(std::vector<T> c) : coeffs_(std::move(c)) { trim(); }

    static Polynomial constant(T c) { return Polynomial(std::vector<T>{c}); }
    static Polynomial monomial(std::size_t k, T c = T{1}) {
        std::vector<T> v(k + 1, T{0});
        v[k] = c;
        return Polynomial(std::move(v));
    }

    /// Degree; the zero polynomial reports -1.
    int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
    bool is_zero() const noexcept { return coeffs_.empty(); }
    const std::vector<T>& coefficients() const noexcept { return coeffs_; }

    T coefficient(std::size_t k) const noexcept { return k < coeffs_.size() ? coeffs_[k] : T{0}; }
    T leading() const noexcept { return coeffs_.empty() ? T{0} : coeffs_.back(); }

    template <typename U>
    auto operator()(U x) const {
        using R = std::common_type_t<T, U>;
        R acc{0};
        for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it)
            acc = acc * x + R(*it);
        return acc;
    }

    Polynomial derivative() const {
        if (coeffs_.size() <= 1) return {};
        std::vector<T> d(coeffs_.size() - 1);
        for (std::size_t k = 1; k < coeffs_.size(); ++k)
            d[k - 1] = coeffs_[k] * static_cast<double>(k);
        return Polynomial(std::move(d));
    }

    /// x * p(x)
    Polynomial times_x() const {
        if (coeffs_.empty()) return {};
        std::vector<T> v(coeffs_.size() + 1, T{0});
        std::copy(coeffs_.begin(), coeffs_.end(), v.begin() + 1);
        return Polynomial(std::move(v));
    }

    Polynomial& operator+=(const Polynomial& o) {
        if (o.coeffs_.size() > coeffs_.size()) coeffs_.resize(o.coeffs_.size(), T{0});
        for (std::size_t k = 0; k < o.coeffs_.size(); ++k) coeffs_[k] += o.coeffs_[k];
        trim();
        return *this;
    }
    Polynomial& operator-=(const Polynomial& o) {
        if (o.coeffs_.size() > coeffs_.size()) coeffs_.resize(o.coeffs_.size(), T{0});
        for (std::size_t k = 0; k < o.coeffs_.size(); ++k) coeffs_[k] -= o.coeffs_[k];
        trim();
        return *this;
    }
    Polynomial& operator*=(T s) {
        for (auto& c : coeffs_) c *= s;
        trim();
        return *this;
    }

    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
    friend Polynomial operator*(Polynomial a, T s) { return a *= s; }
    friend Polynomial operator*(T s, Polynomial a) { return a *= s; }
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        if (a.is_zero() || b.is_zero()) return {};
        std::vector<T> v(a.coeffs_.size() + b.coeffs_.size() - 1, T{0});
        for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
            for (std::size_t j = 0; j < b.coeffs_.size(); ++j)
                v[i + j] += a.coeffs_[i] * b.coeffs_[j];
        return Polynomial(std::move(v));
    }

    /// Coefficient-wise conjugate, so that conj(p)(x) = conj(p(x)) for real x.
    Polynomial conj() const {
        if constexpr (std::is_arithmetic_v<T>) {
            return *this;
        } else {
            std::vector<T> v(coeffs_);
            for (auto& c : v) c = std::conj(c);
            return Polynomial(std::move(v));
        }
    }

    /// Max absolute coefficient difference.
    friend double max_coefficient_distance(const Polynomial& a, const Polynomial& b) {
        const std::size_t n = std::max(a.coeffs_.size(), b.coeffs_.size());
        double d = 0.0;
        for (std::size_t k = 0; k < n; ++k)
            d = std::max(d, static_cast<double>(std::abs(a.coefficient(k) - b.coefficient(k))));
        return d;
    }

private:
    // Exact zeros only; near-zero leading terms are meaningful for degree bookkeeping.
    void trim() {
        while (!coeffs_.empty() && coeffs_.back() == T{0}) coeffs_.pop_back();
    }

    std::vector<T> coeffs_;
};

using RealPolynomial = Polynomial<double>;

} // namespace jweyl

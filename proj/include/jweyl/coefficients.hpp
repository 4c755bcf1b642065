#pragma once

#include <cmath>
#include <cstdlib>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "jweyl/errors.hpp"

namespace jweyl {

/**
 * Truncation window [left, right] of the lattice. Both ends carry a Dirichlet
 * condition, so the operator acts on the interior sites left+1 .. right-1.
 */
class LatticeWindow {
public:
    LatticeWindow(Index left, Index right) : left_(left), right_(right) {
        if (right - left < 2)
            throw DomainError("lattice window [" + std::to_string(left) + ", " + std::to_string(right) +
                              "] has no interior site");
    }

    Index left() const noexcept { return left_; }
    Index right() const noexcept { return right_; }
    Index first_interior() const noexcept { return left_ + 1; }
    Index last_interior() const noexcept { return right_ - 1; }
    std::size_t interior_size() const noexcept { return static_cast<std::size_t>(right_ - left_ - 1); }
    std::size_t size() const noexcept { return static_cast<std::size_t>(right_ - left_ + 1); }

    bool contains(Index n) const noexcept { return n >= left_ && n <= right_; }
    bool is_interior(Index n) const noexcept { return n > left_ && n < right_; }

    /// Window translated by k sites.
    LatticeWindow shifted(Index k) const { return {left_ + k, right_ + k}; }

    friend bool operator==(const LatticeWindow&, const LatticeWindow&) = default;

private:
    Index left_;
    Index right_;
};

enum class Family { table, free, linear_potential, geometric_a, shifted };

inline const char* family_name(Family f) {
    switch (f) {
    case Family::table: return "table";
    case Family::free: return "free";
    case Family::linear_potential: return "linear-potential";
    case Family::geometric_a: return "geometric-a";
    case Family::shifted: return "shifted";
    }
    return "unknown";
}

/**
 * Jacobi coefficients a(n) > 0, b(n) real on a (possibly unbounded) index range.
 *
 * Families:
 *  - table:            explicit a/b values on [first, first+size-1]
 *  - free:             a = 1, b = 0
 *  - linear-potential: a = 1, b(n) = c |n|
 *  - geometric-a:      a(n) = q^|n| (0 < q < 1), b = 0
 *  - shifted:          a(n) = base.a(n+k), b(n) = base.b(n+k)
 *
 * Immutable; copies share the base of shifted models.
 */
class CoefficientModel {
public:
    struct Table {
        Index first = 0;
        std::vector<double> a;
        std::vector<double> b;
    };
    struct Free {};
    struct LinearPotential {
        double c = 1.0;
    };
    struct GeometricA {
        double q = 0.5;
    };
    struct Shifted {
        std::shared_ptr<const CoefficientModel> base;
        Index offset = 0;
    };

    static CoefficientModel free() { return CoefficientModel(Free{}); }

    static CoefficientModel linear_potential(double c) {
        if (!std::isfinite(c)) throw InvariantViolation("linear-potential slope must be finite");
        return CoefficientModel(LinearPotential{c});
    }

    static CoefficientModel geometric_a(double q) {
        if (!(q > 0.0 && q < 1.0)) throw InvariantViolation("geometric-a requires 0 < q < 1");
        return CoefficientModel(GeometricA{q});
    }

    /// a[i], b[i] are the values at site first+i.
    static CoefficientModel table(Index first, std::vector<double> a, std::vector<double> b) {
        if (a.size() != b.size())
            throw InvariantViolation("coefficient table: a and b must have the same length");
        if (a.empty()) throw InvariantViolation("coefficient table is empty");
        for (std::size_t i = 0; i < a.size(); ++i) {
            const Index n = first + static_cast<Index>(i);
            if (!(a[i] > 0.0) || !std::isfinite(a[i]))
                throw InvariantViolation("a(" + std::to_string(n) + ") must be positive and finite");
            if (!std::isfinite(b[i])) throw InvariantViolation("b(" + std::to_string(n) + ") must be finite");
        }
        return CoefficientModel(Table{first, std::move(a), std::move(b)});
    }

    /// Copy of `base` translated so that result.a(n) == base.a(n + offset).
    static CoefficientModel shifted(const CoefficientModel& base, Index offset) {
        return CoefficientModel(Shifted{std::make_shared<const CoefficientModel>(base), offset});
    }

    Family family() const noexcept { return static_cast<Family>(rep_.index()); }
    const auto& representation() const noexcept { return rep_; }

    /// Lowest / highest index where the model is defined; nullopt means unbounded.
    std::optional<Index> lowest() const {
        return std::visit(
            [](const auto& r) -> std::optional<Index> {
                using R = std::decay_t<decltype(r)>;
                if constexpr (std::is_same_v<R, Table>) {
                    return r.first;
                } else if constexpr (std::is_same_v<R, Shifted>) {
                    auto lo = r.base->lowest();
                    return lo ? std::optional<Index>(*lo - r.offset) : std::nullopt;
                } else {
                    return std::nullopt;
                }
            },
            rep_);
    }

    std::optional<Index> highest() const {
        return std::visit(
            [](const auto& r) -> std::optional<Index> {
                using R = std::decay_t<decltype(r)>;
                if constexpr (std::is_same_v<R, Table>) {
                    return r.first + static_cast<Index>(r.a.size()) - 1;
                } else if constexpr (std::is_same_v<R, Shifted>) {
                    auto hi = r.base->highest();
                    return hi ? std::optional<Index>(*hi - r.offset) : std::nullopt;
                } else {
                    return std::nullopt;
                }
            },
            rep_);
    }

    bool defines(Index n) const {
        const auto lo = lowest();
        const auto hi = highest();
        return (!lo || n >= *lo) && (!hi || n <= *hi);
    }

    double a(Index n) const {
        check(n);
        return std::visit(
            [n](const auto& r) -> double {
                using R = std::decay_t<decltype(r)>;
                if constexpr (std::is_same_v<R, Table>) {
                    return r.a[static_cast<std::size_t>(n - r.first)];
                } else if constexpr (std::is_same_v<R, Free> || std::is_same_v<R, LinearPotential>) {
                    return 1.0;
                } else if constexpr (std::is_same_v<R, GeometricA>) {
                    return std::pow(r.q, static_cast<double>(std::labs(n)));
                } else {
                    return r.base->a(n + r.offset);
                }
            },
            rep_);
    }

    double b(Index n) const {
        check(n);
        return std::visit(
            [n](const auto& r) -> double {
                using R = std::decay_t<decltype(r)>;
                if constexpr (std::is_same_v<R, Table>) {
                    return r.b[static_cast<std::size_t>(n - r.first)];
                } else if constexpr (std::is_same_v<R, Free> || std::is_same_v<R, GeometricA>) {
                    return 0.0;
                } else if constexpr (std::is_same_v<R, LinearPotential>) {
                    return r.c * static_cast<double>(std::labs(n));
                } else {
                    return r.base->b(n + r.offset);
                }
            },
            rep_);
    }

    /// The window needs a(n) on [left, right-1] and b(n) on the interior.
    void require_window(const LatticeWindow& w) const {
        if (!defines(w.left()) || !defines(w.right() - 1))
            throw DomainError("window [" + std::to_string(w.left()) + ", " + std::to_string(w.right()) +
                              "] exceeds the coefficient range");
    }

    /// Explicit table of the values on [w.left(), w.right()].
    CoefficientModel tabulate(const LatticeWindow& w) const {
        require_window(w);
        std::vector<double> av, bv;
        av.reserve(w.size());
        bv.reserve(w.size());
        for (Index n = w.left(); n <= w.right(); ++n) {
            // a(right) and b(left) are never read through the window; pad outside the range.
            av.push_back(defines(n) ? a(n) : 1.0);
            bv.push_back(defines(n) ? b(n) : 0.0);
        }
        return table(w.left(), std::move(av), std::move(bv));
    }

    /// Table model equal to this one except a(n) = value (table models only).
    CoefficientModel with_a(Index n, double value) const { return modified(n, value, true); }
    CoefficientModel with_b(Index n, double value) const { return modified(n, value, false); }

private:
    using Rep = std::variant<Table, Free, LinearPotential, GeometricA, Shifted>;

    explicit CoefficientModel(Rep r) : rep_(std::move(r)) {}

    void check(Index n) const {
        if (!defines(n))
            throw DomainError("index " + std::to_string(n) + " outside the coefficient range");
    }

    CoefficientModel modified(Index n, double value, bool is_a) const {
        const auto* t = std::get_if<Table>(&rep_);
        if (t == nullptr) throw PreconditionError("only table models can be modified in place; tabulate first");
        check(n);
        Table copy = *t;
        (is_a ? copy.a : copy.b)[static_cast<std::size_t>(n - copy.first)] = value;
        return table(copy.first, std::move(copy.a), std::move(copy.b));
    }

    Rep rep_;
};

} // namespace jweyl

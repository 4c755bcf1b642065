#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace jweyl {

using cplx = std::complex<double>;

/// Lattice index type. Sites of a window are consecutive integers.
using Index = long;

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An index or argument outside the region where an object is defined.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A coefficient hypothesis was violated (a(n) <= 0, non-finite b(n), ...).
class InvariantViolation : public Error {
public:
    using Error::Error;
};

/// Caller broke an operation's precondition (non-interlaced spectra, too few points, ...).
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// An iterative method did not converge; `index` names the offending item.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, long index) : Error(what), index_(index) {}
    long index() const noexcept { return index_; }

private:
    long index_;
};

/// Evaluation at (or numerically on top of) a pole.
class PoleError : public Error {
public:
    PoleError(const std::string& what, cplx at, double nearest_zero)
        : Error(what), at_(at), nearest_zero_(nearest_zero) {}
    cplx at() const noexcept { return at_; }
    /// The real zero of the denominator closest to `at()`.
    double nearest_zero() const noexcept { return nearest_zero_; }

private:
    cplx at_;
    double nearest_zero_;
};

/// A fitted quantity failed validation on the remaining samples.
class FitFailure : public Error {
public:
    FitFailure(const std::string& what, double discrepancy) : Error(what), discrepancy_(discrepancy) {}
    double discrepancy() const noexcept { return discrepancy_; }

private:
    double discrepancy_;
};

/// Malformed or inconsistent configuration input. `line` is 1-based, 0 if unknown.
class ConfigError : public Error {
public:
    ConfigError(const std::string& what, int line = 0) : Error(what), line_(line) {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

} // namespace jweyl

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Dense>

namespace hmde {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed construction data (non-increasing grid, negative jump, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A time outside the span of a path or integrator.
class OutOfDomain : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class SpanMismatch : public Error {
public:
    using Error::Error;
};

/// Integration over [c, d] with c > d.
class EmptyInterval : public Error {
public:
    using Error::Error;
};

/// A field handle produced a non-finite value.
class EvaluationError : public Error {
public:
    using Error::Error;
};

/// Declared bound data (M, phi) failed validation on the sample set.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// Fixed-point or corrector iteration ran out of iterations. Carries the last
/// two iterates so callers can judge whether the contraction failed or the
/// tolerance was simply too tight.
class NonConvergence : public Error {
public:
    NonConvergence(const std::string& what, Eigen::VectorXd previous, Eigen::VectorXd last)
        : Error(what), previous_(std::move(previous)), last_(std::move(last)) {}

    const Eigen::VectorXd& previous() const noexcept { return previous_; }
    const Eigen::VectorXd& last() const noexcept { return last_; }

private:
    Eigen::VectorXd previous_;
    Eigen::VectorXd last_;
};

/// Whole-path residual still above tolerance after every allowed sweep.
class ResidualFailure : public Error {
public:
    ResidualFailure(const std::string& what, double residual) : Error(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// A sub-solve of a chained long-horizon solve failed.
class ChainFailure : public Error {
public:
    ChainFailure(const std::string& what, std::size_t chain) : Error(what), chain_(chain) {}
    std::size_t chain() const noexcept { return chain_; }

private:
    std::size_t chain_;
};

class DerivativeUndefined : public Error {
public:
    using Error::Error;
};

class SingularMatrix : public Error {
public:
    using Error::Error;
};

/// Numerical evidence against a checked hypothesis.
class ViolationError : public Error {
public:
    using Error::Error;
};

} // namespace hmde

#pragma once

#include <stdexcept>
#include <string>

namespace sticky {

// Input outside the mathematical domain of an operation (includes NaN/inf).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Quadrature could not reach the requested tolerance; carries the best estimate.
class AccuracyError : public std::runtime_error {
public:
    AccuracyError(const std::string& what, double best, double residual)
        : std::runtime_error(what), best_(best), residual_(residual) {}

    double best_estimate() const noexcept { return best_; }
    double residual() const noexcept { return residual_; }

private:
    double best_;
    double residual_;
};

class InversionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Conditioning on B_t = b where the Gaussian density of B_t is numerically negligible.
class ConditioningError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// The base Brownian path ended before the sticky clock reached the horizon.
class InsufficientPathError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class OutOfRangeError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

class InsufficientDataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace sticky

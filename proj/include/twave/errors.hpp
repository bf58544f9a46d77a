#pragma once

#include <stdexcept>
#include <string>

namespace twave {

// Argument outside the mathematical domain of an operation (e.g. U <= 0).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Wave speed at which the traveling-wave reduction degenerates (|c| = 1, or c = 0
// where the equilibrium classification is undefined).
class SingularSpeedError : public DomainError {
public:
    using DomainError::DomainError;
};

// Invalid or inconsistent configuration. Raised before any work is done.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Numerical failure during a computation that was configured correctly.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class StiffnessError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class SolverInstabilityError : public NumericalError {
public:
    SolverInstabilityError(const std::string& what, long cell, double time)
        : NumericalError(what), cell_(cell), time_(time) {}
    long cell() const noexcept { return cell_; }
    double time() const noexcept { return time_; }

private:
    long cell_;
    double time_;
};

// A front came within the guard band of a non-periodic boundary.
class BoundaryReachedError : public NumericalError {
public:
    BoundaryReachedError(const std::string& what, double time) : NumericalError(what), time_(time) {}
    double time() const noexcept { return time_; }

private:
    double time_;
};

class InsufficientDataError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace twave

#pragma once

#include <stdexcept>
#include <string>

namespace qe {

/// Violated precondition or malformed input.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A symbol touches zero where the operation needs a strictly positive one
/// (light-cone velocity, ς/μ split).
class CriticalSymbolError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Internal consistency failure: two routes disagree, a bound is violated,
/// an integrator diverged or a quadrature did not converge.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IllConditionedError : public NumericalError {
public:
    IllConditionedError(const std::string& what, double condition)
        : NumericalError(what), condition_(condition) {}
    double condition() const noexcept { return condition_; }

private:
    double condition_;
};

/// Unparseable configuration or spectral spec string.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace qe

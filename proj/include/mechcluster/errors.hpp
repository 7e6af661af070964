#pragma once

#include <stdexcept>
#include <string>

namespace mechcluster {

/// Matrix or vector dimensions inconsistent with the requested operation.
class ShapeError : public std::invalid_argument {
public:
    explicit ShapeError(const std::string& what) : std::invalid_argument(what) {}
};

/// Parameter value outside the physically meaningful domain.
class DomainError : public std::invalid_argument {
public:
    explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

/// Configuration file cannot be parsed or resolved into a scenario.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Drift matrix is not Hurwitz, so no steady state exists.
class StabilityError : public std::runtime_error {
public:
    explicit StabilityError(const std::string& what) : std::runtime_error(what) {}
};

/// Matrix expected to be positive definite is not.
class DefinitenessError : public std::runtime_error {
public:
    explicit DefinitenessError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical routine failed to converge or produced an unusable result.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// Drive synthesis is impossible for the given couplings.
class SynthesisError : public std::runtime_error {
public:
    explicit SynthesisError(const std::string& what) : std::runtime_error(what) {}
};

}

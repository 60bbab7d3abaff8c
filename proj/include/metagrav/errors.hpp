#pragma once

#include <stdexcept>
#include <string>

namespace metagrav {

/// Argument outside the domain of a physical or numerical routine.
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// Inconsistent or incomplete run/propagator configuration.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// A numerical method failed to converge or produced non-finite values.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// Input data (fields, matrices) violates its invariants.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace metagrav

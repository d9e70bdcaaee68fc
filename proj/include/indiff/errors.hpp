#pragma once

#include <stdexcept>
#include <string>

namespace indiff {

/// Base class for all errors thrown by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid or inconsistent run configuration (bad key, bad value, degenerate grid).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A model parameter outside its admissible set (e.g. mu = 0, sigma <= 0).
class ParameterError : public Error {
public:
    using Error::Error;
};

/// Utility function evaluated outside its domain, or inverse outside its range.
class UtilityDomainError : public Error {
public:
    using Error::Error;
};

/// Mesh index out of range.
class IndexError : public Error {
public:
    using Error::Error;
};

/// Numerical failure (zero pivot, non-finite value).
class NumericalError : public Error {
public:
    using Error::Error;
};

/// An operation was invoked outside its stated precondition.
class ContractViolation : public Error {
public:
    using Error::Error;
};

} // namespace indiff

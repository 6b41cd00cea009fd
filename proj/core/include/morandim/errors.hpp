#ifndef MORANDIM_ERRORS_HPP
#define MORANDIM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace morandim {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A word uses a symbol outside its level's alphabet, or is otherwise
/// malformed for the symbol space it is evaluated against.
class InvalidWordError : public Error {
public:
    using Error::Error;
};

/// An enumeration (cylinder scan, stopping-set build) would exceed its
/// stated budget. Never signalled by silent truncation.
class BudgetError : public Error {
public:
    using Error::Error;
};

/// A descent hit its depth cap before reaching the requested scale.
class DepthError : public Error {
public:
    using Error::Error;
};

/// Configuration input failed to parse or violates a field invariant.
/// Messages carry the offending field path.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// An estimator could not produce a usable value (e.g. every sample fell
/// inside the truncation radius).
class DegenerateEstimateError : public Error {
public:
    using Error::Error;
};

/// Cross-route agreement or an ordering assertion failed beyond tolerance.
class ConsistencyError : public Error {
public:
    using Error::Error;
};

} // namespace morandim

#endif

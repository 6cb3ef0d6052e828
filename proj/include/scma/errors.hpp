#pragma once

#include <stdexcept>

namespace scma {

/// Invalid argument value (out of range, inconsistent sizes, ...).
struct ParameterError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// More users requested than the factor graph can hold.
struct CapacityError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Malformed or invariant-violating codebook / config file.
struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Exhaustive computation refused because the search space is too large.
struct GuardError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace scma

#pragma once

#include <stdexcept>
#include <string>

namespace gmvp {

// Bad caller input: dimensions, non-finite values, invalid parameters.
struct InputError : std::invalid_argument {
    explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

// Input is structurally valid but the requested quantity does not exist
// (singular matrices, zero rank, vanishing normalizers).
struct DegenerateError : std::runtime_error {
    explicit DegenerateError(const std::string& what) : std::runtime_error(what) {}
};

// Request is outside the supported regime (e.g. exact power at large p, n).
struct UnsupportedError : std::runtime_error {
    explicit UnsupportedError(const std::string& what) : std::runtime_error(what) {}
};

// Inconsistent experiment or CLI configuration.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace gmvp

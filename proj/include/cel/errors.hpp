/// @file errors.hpp
/// @brief Error categories shared by all modules.
#pragma once

#include <stdexcept>
#include <string>

namespace cel {

/// Invalid grid, config key, mismatched grids, missing data.
struct ConfigurationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Non-finite state during time stepping.
struct InstabilityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Unreadable or malformed files.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace cel

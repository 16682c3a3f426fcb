// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0

#ifndef NETID_ERRORS_HPP
#define NETID_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace netid {

/// Bad flags, invalid parameters, precondition breaches.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Mismatched sizes, node sets, or index ranges.
struct DimensionError : std::runtime_error {
    explicit DimensionError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed input files.
struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Singular systems, divergent simulations, domain violations.
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Filesystem failures.
struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace netid

#endif // NETID_ERRORS_HPP

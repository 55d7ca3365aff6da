#pragma once

#include <stdexcept>
#include <string>

namespace prnu {

/// Bad user-supplied parameter or configuration value.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Unusable input data: unreadable files, malformed headers, dimension mismatches.
struct DataError : std::runtime_error {
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numeric degeneracy: zero-variance inputs, targets the search cannot reach.
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Raised by the strength search when no probed strength produces a finite PSNR.
struct UnreachableTarget : NumericError {
    explicit UnreachableTarget(const std::string& msg) : NumericError(msg) {}
};

} // namespace prnu

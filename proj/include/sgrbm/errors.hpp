#pragma once

#include <stdexcept>

namespace sgrbm {

/// Base class for everything thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionError : Error { using Error::Error; };    // shape mismatches
struct ParameterError : Error { using Error::Error; };    // bad argument values
struct ConfigError : Error { using Error::Error; };       // run-config problems
struct ParseError : Error { using Error::Error; };        // malformed input files
struct NumericError : Error { using Error::Error; };      // NaN/Inf blowups
struct EstimationError : Error { using Error::Error; };   // degenerate estimates
struct UnsupportedError : Error { using Error::Error; };  // operation not available for this model

}  // namespace sgrbm

#pragma once

#include <stdexcept>
#include <string>

namespace rnr {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Invalid configuration or precondition violation (exit code 2).
struct ConfigError : Error {
  using Error::Error;
};

/// Dimension/shape disagreement between arrays or files.
struct ShapeError : ConfigError {
  using ConfigError::ConfigError;
};

/// Unreadable, empty, or malformed input data (exit code 3).
struct DataError : Error {
  using Error::Error;
};

/// Corrupt or incompatible checkpoint file.
struct FormatError : DataError {
  using DataError::DataError;
};

/// Negative sampling has no candidates left.
struct SamplingError : DataError {
  using DataError::DataError;
};

/// Training produced a non-finite loss (exit code 4).
struct DivergenceError : Error {
  using Error::Error;
};

}  // namespace rnr

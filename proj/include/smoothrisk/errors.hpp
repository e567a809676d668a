#pragma once

#include <stdexcept>
#include <string>

namespace smoothrisk {

/// Base class for all library errors.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Malformed input, degenerate datasets, dimension mismatches.
class DataError : public Error {
  public:
    using Error::Error;
};

/// Non-finite objective values or gradients, undefined evaluation points.
class NumericalError : public Error {
  public:
    using Error::Error;
};

/// Invalid configuration values.
class ConfigError : public Error {
  public:
    using Error::Error;
};

} // namespace smoothrisk

#pragma once

#include <stdexcept>
#include <string>

namespace cxtlms {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite or otherwise unusable sample values.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Tensor index outside the valid 1-based range of its mode.
class IndexError : public Error {
 public:
  using Error::Error;
};

/// Mode number outside [0, M).
class ModeError : public Error {
 public:
  using Error::Error;
};

/// Mismatched vector or matrix dimensions.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Requested allocation exceeds a configured guard.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration value or malformed config file.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A non-finite value appeared in filter state during a run.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Failure reading or writing a file.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace cxtlms

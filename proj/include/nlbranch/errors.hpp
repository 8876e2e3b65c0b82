#pragma once

#include <stdexcept>
#include <string>

namespace nlbranch {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A point or vector has the wrong number of coordinates.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A point lies outside the closure E where it must be inside.
class OutsideClosureError : public Error {
 public:
  using Error::Error;
};

/// A model ingredient fails its admissibility conditions.
class ValidationError : public Error {
 public:
  ValidationError(std::string reason, const std::string& what)
      : Error(what), reason_(std::move(reason)) {}

  /// Short machine-readable tag, e.g. "offspring_condition_violated".
  const std::string& reason() const { return reason_; }

 private:
  std::string reason_;
};

/// A deterministic flow does not reach the boundary within its time cap.
class UnboundedEntryTimeError : public Error {
 public:
  using Error::Error;
};

/// A deterministic reference solver failed to converge.
class OracleError : public Error {
 public:
  using Error::Error;
};

/// Configuration text or command-line input could not be interpreted.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace nlbranch

#pragma once

#include <stdexcept>
#include <string>

namespace mlabc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A stochastic model produced a negative hazard or an otherwise invalid state.
class InvalidModel : public Error {
 public:
  using Error::Error;
};

/// A numerical routine failed to reach its accuracy contract.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Prior truncation left (numerically) no mass to sample from.
class DegenerateTruncation : public Error {
 public:
  using Error::Error;
};

/// Importance weights collapsed onto a single particle, or all vanished.
class DegeneracyError : public Error {
 public:
  using Error::Error;
};

/// A posterior or reference distribution has no mass on the lattice.
class DegeneratePosterior : public Error {
 public:
  using Error::Error;
};

/// Malformed experiment configuration or input file.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace mlabc

#pragma once

#include <stdexcept>
#include <string>

namespace sembase {

// Base of all library errors. CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// A name already bound to a different base within the same domain.
class UniquenessError : public Error {
 public:
  using Error::Error;
};

// Instance too large for exhaustive enumeration.
class ComplexityGuardError : public Error {
 public:
  using Error::Error;
};

// A candidate base set could not be formed (too few distinct directions,
// duplicate bases after quantization).
class DegenerateCandidate : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace sembase

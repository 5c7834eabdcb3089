#pragma once

#include <stdexcept>
#include <string>

namespace stablesde {

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

/// The spectral measure fails the non-degeneracy bound.
class DegenerateMeasure : public Error {
 public:
  using Error::Error;
};

/// The spatial grid cannot resolve the requested object.
class UnderResolvedGrid : public Error {
 public:
  using Error::Error;
};

/// Picard iteration for the mild equation did not contract.
class NonContraction : public Error {
 public:
  NonContraction(const std::string& what, double factor, int iterations)
      : Error(what), factor_(factor), iterations_(iterations) {}

  double factor() const { return factor_; }
  int iterations() const { return iterations_; }

 private:
  double factor_;
  int iterations_;
};

/// Malformed experiment configuration or manifest.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// The requested run would exceed the memory budget.
class ResourceError : public Error {
 public:
  using Error::Error;
};

}  // namespace stablesde

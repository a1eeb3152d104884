#pragma once

#include <stdexcept>
#include <string>

namespace gppl {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// A quadrature integrand, correction integral or objective produced a
// non-finite or otherwise unusable value.
class NumericFailure : public Error {
 public:
  using Error::Error;
};

// Raised by PdFactor when a pivot falls below tolerance. `minor` is the
// zero-based index of the leading minor that failed.
class NotPositiveDefinite : public Error {
 public:
  NotPositiveDefinite(const std::string& what, long minor)
      : Error(what + " (leading minor " + std::to_string(minor) + ")"),
        minor_(minor) {}
  long minor() const noexcept { return minor_; }

 private:
  long minor_;
};

class UnsupportedLikelihood : public Error {
 public:
  using Error::Error;
};

class InternalConsistency : public Error {
 public:
  using Error::Error;
};

class FitFailure : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace gppl

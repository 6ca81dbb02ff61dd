#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace couplekit {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input: lengths, weights, exponents, parameters out of domain.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class NonpositiveWeight : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class ExponentOutOfRange : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

// A curve that violates concavity, monotonicity or slope/value consistency.
class InvalidCurve : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

// A documented precondition of an operation does not hold. `witness`
// carries whatever certifies the violation (an element, a t value, ...).
class PreconditionFailed : public Error {
 public:
  PreconditionFailed(const std::string& what, std::vector<double> witness = {})
      : Error(what), witness_(std::move(witness)) {}
  const std::vector<double>& witness() const { return witness_; }

 private:
  std::vector<double> witness_;
};

// Iterative solver ran out of budget; [lower, upper] brackets the answer.
class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& what, double lower, double upper)
      : Error(what), lower_(lower), upper_(upper) {}
  double lower() const { return lower_; }
  double upper() const { return upper_; }

 private:
  double lower_;
  double upper_;
};

// The request is valid but outside what this implementation can compute.
class Unsupported : public Error {
 public:
  using Error::Error;
};

// An internal consistency assertion failed. Always a bug.
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace couplekit

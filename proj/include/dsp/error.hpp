#pragma once

#include <stdexcept>
#include <string>

namespace dsp {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on the arguments was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Shift-compare iteration for a scalar profile ran out of steps.
class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& what, double last_mismatch)
      : Error(what), last_mismatch_(last_mismatch) {}
  double last_mismatch() const noexcept { return last_mismatch_; }

 private:
  double last_mismatch_;
};

/// Data that spreads under the scheme (rarefaction orientation).
class EntropyViolation : public Error {
 public:
  using Error::Error;
};

/// Flux derivative left the admissible band along the computed states.
class CflViolation : public Error {
 public:
  using Error::Error;
};

/// Node doubling or adaptive refinement did not settle.
class QuadratureFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace dsp

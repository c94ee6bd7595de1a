#pragma once

#include <stdexcept>
#include <string>

namespace mcfi {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Array lengths disagree with the grid, design or snapshot dimensions.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Non-finite input or result, or a numerically failed sub-step.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Forward marching produced NaN/Inf.
class DivergenceError : public NumericError {
 public:
  DivergenceError(int step, const std::string& what)
      : NumericError(what), step_(step) {}
  int step() const { return step_; }

 private:
  int step_;
};

class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

/// Mode and reference are orthogonal, so the sign is undefined.
class AmbiguousAlignmentError : public Error {
 public:
  using Error::Error;
};

/// Gradient requested where the objective has a kink (||phi - phi*|| = 0).
class NonDifferentiableError : public Error {
 public:
  using Error::Error;
};

class SingularSystemError : public NumericError {
 public:
  using NumericError::NumericError;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace mcfi

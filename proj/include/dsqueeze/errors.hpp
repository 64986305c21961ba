#pragma once

#include <stdexcept>
#include <string>

namespace dsq {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Combination of inputs that this library intentionally does not handle.
class UnsupportedError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Numerical setup (grid, quadrature order) unable to reach the requested accuracy.
class ConfigurationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A converged result failed a post-hoc accuracy check (box too small, tail not decayed).
class AccuracyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Root bracket does not contain the target value.
class BracketError : public std::runtime_error {
 public:
  BracketError(const std::string& what, double lo_value, double hi_value)
      : std::runtime_error(what), lo_value_(lo_value), hi_value_(hi_value) {}
  double lo_value() const { return lo_value_; }
  double hi_value() const { return hi_value_; }

 private:
  double lo_value_;
  double hi_value_;
};

/// Iterative method failed to converge.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dsq

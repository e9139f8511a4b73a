#pragma once

#include <stdexcept>
#include <string>

namespace dmoc {

/// Argument shapes disagree with the callee's contract.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A NaN or infinity appeared; usually means evaluation left the model's domain.
class NonFiniteError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A matrix that must be invertible (mass matrix, Newton Jacobian) is not.
class SingularMatrixError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative solve hit its iteration cap.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The problem contains features outside the supported formulation.
class UnsupportedError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Bad user configuration (unknown names, invalid parameters).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace dmoc

#pragma once

#include <stdexcept>
#include <string>

namespace amfg {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed config document, missing field or shape mismatch. `field()` is the
// dotted path of the offending entry, e.g. "dynamics.B" or "costs.Q[3]".
class SpecError : public Error {
 public:
  SpecError(std::string field, const std::string& message)
      : Error(field.empty() ? message : field + ": " + message),
        field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// A weight or covariance violates its symmetry/definiteness requirement.
class ValidationError : public SpecError {
 public:
  using SpecError::SpecError;
};

// S_t - C^T P_hat_{t+1} C is not positive definite at `step()`.
class ValidityConditionError : public Error {
 public:
  ValidityConditionError(int step, double margin)
      : Error("validity condition violated at t=" + std::to_string(step) +
              ": min eigenvalue of S_t - C^T P_hat_{t+1} C is " +
              std::to_string(margin)),
        step_(step),
        margin_(margin) {}

  int step() const noexcept { return step_; }
  double margin() const noexcept { return margin_; }

 private:
  int step_;
  double margin_;
};

// Singular or non positive definite matrix encountered inside a recursion.
class NumericalError : public Error {
 public:
  NumericalError(std::string what_matrix, int step, const std::string& detail)
      : Error(what_matrix + " at t=" + std::to_string(step) + ": " + detail),
        matrix_(std::move(what_matrix)),
        step_(step) {}

  const std::string& matrix() const noexcept { return matrix_; }
  int step() const noexcept { return step_; }

 private:
  std::string matrix_;
  int step_;
};

}  // namespace amfg

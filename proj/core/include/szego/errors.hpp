#pragma once

#include <stdexcept>
#include <string>

namespace szego {

/// Input outside an operation's mathematical domain (|alpha| >= 1, |z| >= 1, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A numerical procedure could not certify its own output.
class ComputationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NonUnitaryError : public ComputationError {
 public:
  NonUnitaryError(const std::string& what, double worstModulus)
      : ComputationError(what), worstModulus_(worstModulus) {}
  [[nodiscard]] double worstModulus() const { return worstModulus_; }

 private:
  double worstModulus_;
};

class SolveError : public ComputationError {
 public:
  SolveError(const std::string& what, double residual)
      : ComputationError(what), residual_(residual) {}
  [[nodiscard]] double residual() const { return residual_; }

 private:
  double residual_;
};

}  // namespace szego

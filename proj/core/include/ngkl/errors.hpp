#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ngkl {

// Argument outside the mathematical domain of a function (ln Γ(0), y <= 0, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Shapes of the operands do not agree.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Parameter record violates its invariants (non-positive shape, asymmetric precision, ...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Cholesky factorization hit a non-positive pivot.
class FactorizationError : public std::runtime_error {
 public:
  FactorizationError(std::size_t pivot, double value)
      : std::runtime_error("matrix is not positive definite: pivot " + std::to_string(pivot) +
                           " is " + std::to_string(value)),
        pivot_(pivot) {}

  [[nodiscard]] std::size_t pivot_index() const noexcept { return pivot_; }

 private:
  std::size_t pivot_;
};

// Floating-point result is not trustworthy (negative KL beyond rounding, b_n <= 0,
// non-finite log density, disagreeing evidence paths).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Design matrix does not have full column rank.
class RankDeficientError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace ngkl

#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace koszul {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DivisionByZero : public Error {
 public:
  DivisionByZero() : Error("division by zero in prime field") {}
};

// batch_inverse met a zero; `index` is its position in the input.
class ZeroEntry : public Error {
 public:
  explicit ZeroEntry(std::size_t index)
      : Error("zero entry at index " + std::to_string(index)), index(index) {}
  std::size_t index;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// f(x) shares a factor with f'(x); `witness` is the gcd, low-to-high coefficients.
class NotSquarefree : public Error {
 public:
  NotSquarefree(const std::string& what, std::string witness)
      : Error(what), witness(std::move(witness)) {}
  std::string witness;
};

class SingularPoint : public Error {
 public:
  SingularPoint(const std::string& what, std::string point)
      : Error(what), point(std::move(point)) {}
  std::string point;
};

class Shortfall : public Error {
 public:
  Shortfall(std::size_t required, std::size_t available)
      : Error("insufficient rational points: required " + std::to_string(required) +
              ", available " + std::to_string(available) + " (raise the prime)"),
        required(required),
        available(available) {}
  std::size_t required;
  std::size_t available;
};

// A dimension audit (Riemann-Roch, plane-curve Hilbert function) disagreed.
class ModelInconsistency : public Error {
 public:
  ModelInconsistency(const std::string& what, long long expected, long long actual)
      : Error(what + " (expected " + std::to_string(expected) + ", got " +
              std::to_string(actual) + ")"),
        expected(expected),
        actual(actual) {}
  long long expected;
  long long actual;
};

// Evaluation at the sample set is not known to be injective for this bundle,
// or a product fell outside the target section space.
class GuardViolation : public Error {
 public:
  using Error::Error;
};

class NotRepresentable : public Error {
 public:
  using Error::Error;
};

class NotComputable : public Error {
 public:
  using Error::Error;
};

class BudgetExceeded : public Error {
 public:
  BudgetExceeded(const std::string& what, std::size_t pivots_done, std::string checkpoint)
      : Error(what), pivots_done(pivots_done), checkpoint(std::move(checkpoint)) {}
  std::size_t pivots_done;
  std::string checkpoint;  // path of the saved active matrix, empty if none
};

class CapExceeded : public Error {
 public:
  using Error::Error;
};

}  // namespace koszul

#pragma once

#include <stdexcept>
#include <string>

namespace chernoff {

// Exit codes used by the CLI: 0 success, 2 validation, 3 numeric guard, 4 budget.
enum class ExitCode : int { ok = 0, validation = 2, numeric = 3, budget = 4 };

// Bad configuration or precondition violation detected before any numerics run.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Quadrature non-convergence, negative densities, non-SPD matrices and friends.
// Carries the offending residual when one is available.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what, double residual = 0.0)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

// Estimated work exceeds the configured budget.
class BudgetError : public std::runtime_error {
 public:
  BudgetError(const std::string& what, double estimate, double budget)
      : std::runtime_error(what), estimate_(estimate), budget_(budget) {}
  double estimate() const { return estimate_; }
  double budget() const { return budget_; }

 private:
  double estimate_;
  double budget_;
};

}  // namespace chernoff

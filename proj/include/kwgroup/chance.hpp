#pragma once

#include <cstdint>
#include <vector>

#include "kwgroup/model.hpp"

namespace kwgroup {

/// Monte Carlo settings for budget-compliance estimation.
struct ChanceCheckConfig {
  std::int64_t samples = 10000;
  std::uint64_t seed = 0;
};

/// Result of one budget-compliance check for a single adgroup.
struct ChanceCheckResult {
  double alpha_hat = 1.0;       ///< estimated probability the spend fits the budget
  double standard_error = 0.0;  ///< binomial standard error of alpha_hat
  bool satisfied = true;        ///< alpha_hat >= the adgroup's required level
  std::int64_t samples = 0;
};

/// Probability that adgroup j's total spend stays within its budget when the
/// keywords flagged in x_column (length n, entries 0/1) are assigned to it.
/// Exact under the normal spend model: Phi((B - sum mu) / sqrt(sum sigma^2)).
/// Degenerates to a 0/1 step when the selection carries no spend variance.
double analytic_chance(const ProblemInstance& inst,
                       const std::vector<int>& x_column, int j);

/// Left-hand side of the deterministic budget constraint for adgroup j:
///   sum x*mu + Phi^{-1}(alpha_j) * sqrt(sum x^2 * sigma^2).
/// Values at most the budget certify the chance requirement for alpha_j in
/// [0.5, 1). Accepts fractional x.
double deterministic_budget_lhs(const ProblemInstance& inst,
                                const std::vector<double>& x_column, int j);
double deterministic_budget_lhs(const ProblemInstance& inst,
                                const std::vector<int>& x_column, int j);

/// Monte Carlo estimate of the budget-compliance probability for adgroup j.
/// Draws cfg.samples independent spend scenarios (normal per keyword) and
/// counts those whose total stays within the budget. Deterministic for a
/// fixed seed.
ChanceCheckResult simulate_chance(const ProblemInstance& inst,
                                  const std::vector<int>& x_column, int j,
                                  const ChanceCheckConfig& cfg);

}  // namespace kwgroup

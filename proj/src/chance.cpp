#include "kwgroup/chance.hpp"

#include <cmath>
#include <stdexcept>

#include "kwgroup/normal.hpp"

namespace kwgroup {

namespace {

void check_column(const ProblemInstance& inst, std::size_t len, int j) {
  if (len != static_cast<std::size_t>(inst.n())) {
    throw std::invalid_argument("column length does not match instance");
  }
  if (j < 0 || j >= inst.m()) {
    throw std::invalid_argument("adgroup index out of range");
  }
}

}  // namespace

double analytic_chance(const ProblemInstance& inst,
                       const std::vector<int>& x_column, int j) {
  check_column(inst, x_column.size(), j);
  double mu = 0.0, var = 0.0;
  for (int i = 0; i < inst.n(); ++i) {
    if (x_column[i]) {
      mu += inst.cost_mean(i, j);
      double s = inst.cost_sd(i, j);
      var += s * s;
    }
  }
  double budget = inst.adgroup(j).budget;
  if (var == 0.0) return mu <= budget ? 1.0 : 0.0;
  return normal_cdf((budget - mu) / std::sqrt(var));
}

double deterministic_budget_lhs(const ProblemInstance& inst,
                                const std::vector<double>& x_column, int j) {
  check_column(inst, x_column.size(), j);
  double mu = 0.0, var = 0.0;
  for (int i = 0; i < inst.n(); ++i) {
    double x = x_column[i];
    if (x != 0.0) {
      mu += x * inst.cost_mean(i, j);
      double s = x * inst.cost_sd(i, j);
      var += s * s;
    }
  }
  return mu + normal_quantile(inst.adgroup(j).alpha) * std::sqrt(var);
}

double deterministic_budget_lhs(const ProblemInstance& inst,
                                const std::vector<int>& x_column, int j) {
  std::vector<double> xd(x_column.begin(), x_column.end());
  return deterministic_budget_lhs(inst, xd, j);
}

ChanceCheckResult simulate_chance(const ProblemInstance& inst,
                                  const std::vector<int>& x_column, int j,
                                  const ChanceCheckConfig& cfg) {
  check_column(inst, x_column.size(), j);
  if (cfg.samples < 1) throw std::invalid_argument("simulate_chance: samples < 1");

  ChanceCheckResult out;
  out.samples = cfg.samples;
  const double budget = inst.adgroup(j).budget;
  const double alpha = inst.adgroup(j).alpha;

  std::vector<int> picked;
  for (int i = 0; i < inst.n(); ++i) {
    if (x_column[i]) picked.push_back(i);
  }
  if (picked.empty()) {
    out.alpha_hat = 1.0;
    out.standard_error = 0.0;
    out.satisfied = 1.0 >= alpha;
    return out;
  }

  // Keyword-major accumulation: one pass per keyword over a totals vector,
  // so the draw sequence does not depend on how many samples fit a budget.
  std::vector<double> totals(static_cast<std::size_t>(cfg.samples), 0.0);
  Rng rng(cfg.seed);
  for (int i : picked) {
    const double mu = inst.cost_mean(i, j);
    const double sd = inst.cost_sd(i, j);
    for (auto& t : totals) t += mu + sd * rng.standard_normal();
  }
  std::int64_t hits = 0;
  for (double t : totals) {
    if (t <= budget) ++hits;
  }
  out.alpha_hat = static_cast<double>(hits) / static_cast<double>(cfg.samples);
  out.standard_error =
      std::sqrt(out.alpha_hat * (1.0 - out.alpha_hat) / static_cast<double>(cfg.samples));
  out.satisfied = out.alpha_hat >= alpha;
  return out;
}

}  // namespace kwgroup

#pragma once

// Shared helpers for the unit tests: a brute-force assignment oracle and a
// small random-instance factory. The oracle enumerates every assignment, so
// keep n under about ten keywords.

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "kwgroup/chance.hpp"
#include "kwgroup/model.hpp"
#include "kwgroup/normal.hpp"
#include "kwgroup/relaxation.hpp"

namespace testutil {

using namespace kwgroup;

inline bool feasible_assignment(const ProblemInstance& inst, const Assignment& x) {
  for (int j = 0; j < inst.m(); ++j) {
    if (deterministic_budget_lhs(inst, x.column(j), j) > inst.adgroup(j).budget) {
      return false;
    }
  }
  return risk_feasible(inst, x);
}

struct BruteResult {
  double value = 0.0;
  Assignment best;  // lexicographically smallest among the maximizers
};

/// Exhaustive search over all (m+1)^n assignments under the deterministic
/// budget certificates and the risk bound. Enumeration order is
/// lexicographic in (row, column) with "unassigned" first, so the first
/// maximizer found is the lexicographically smallest.
inline BruteResult brute_force(const ProblemInstance& inst) {
  const int n = inst.n();
  const int m = inst.m();
  std::vector<int> choice(n, -1);
  BruteResult out;
  out.best = Assignment(n, m);
  out.value = 0.0;
  bool first = true;
  while (true) {
    Assignment x(n, m);
    for (int i = 0; i < n; ++i) {
      if (choice[i] >= 0) x.assign(i, choice[i]);
    }
    if (feasible_assignment(inst, x)) {
      const double v = expected_profit(inst, x);
      if (first || v > out.value + 1e-12) {
        out.value = v;
        out.best = x;
        first = false;
      }
    }
    int i = n - 1;
    while (i >= 0 && choice[i] == m - 1) {
      choice[i] = -1;
      --i;
    }
    if (i < 0) break;
    ++choice[i];
  }
  return out;
}

/// Best integer value consistent with the fixings, or -infinity when no
/// feasible completion exists. Used to confirm relaxation upper bounds.
inline double brute_force_under(const ProblemInstance& inst, const NodeFixings& fix) {
  const int n = inst.n();
  const int m = inst.m();
  std::vector<int> free_rows;
  Assignment base(n, m);
  for (int i = 0; i < n; ++i) {
    if (auto j = fix.row_assigned(i)) {
      base.assign(i, *j);
    } else {
      bool any_free = false;
      for (int j = 0; j < m; ++j) any_free = any_free || !fix.is_fixed_zero(i, j);
      if (any_free) free_rows.push_back(i);
    }
  }
  double best = -std::numeric_limits<double>::infinity();
  std::vector<int> choice(free_rows.size(), -1);
  while (true) {
    Assignment x = base;
    bool ok = true;
    for (std::size_t k = 0; k < free_rows.size(); ++k) {
      const int i = free_rows[k];
      const int j = choice[k];
      if (j >= 0) {
        if (fix.is_fixed_zero(i, j)) {
          ok = false;
          break;
        }
        x.assign(i, j);
      }
    }
    if (ok && feasible_assignment(inst, x)) {
      best = std::max(best, expected_profit(inst, x));
    }
    std::size_t k = free_rows.size();
    while (k > 0 && choice[k - 1] == m - 1) {
      choice[k - 1] = -1;
      --k;
    }
    if (k == 0) break;
    ++choice[k - 1];
  }
  return best;
}

/// Random but well-posed instance. Roughly one keyword in five carries a
/// loss-making column; budgets admit about half the demand-weighted spend.
inline ProblemInstance random_instance(Rng& rng, int n, int m,
                                       bool with_risk_bound) {
  std::vector<KeywordStat> kws(n);
  for (int i = 0; i < n; ++i) {
    KeywordStat& k = kws[i];
    k.id = "kw_" + std::to_string(i + 1);
    k.demand = 5.0 + 45.0 * rng.uniform();
    k.value_per_sale = 2.0 + 18.0 * rng.uniform();
    k.product_label = "prod_" + std::to_string(1 + static_cast<int>(rng.below(3)));
    k.hierarchy_label = "tier_" + std::to_string(1 + static_cast<int>(rng.below(2)));
    for (int j = 0; j < m; ++j) {
      const double ctr_mean = 0.02 + 0.25 * rng.uniform();
      const double cvr_mean = 0.05 + 0.6 * rng.uniform();
      k.ctr.push_back({ctr_mean, 0.5 * ctr_mean * rng.uniform()});
      k.cvr.push_back({cvr_mean, 0.5 * cvr_mean * rng.uniform()});
      // every so often price the click so the column loses money
      const double breakeven = k.value_per_sale * cvr_mean;
      const double cpc = rng.uniform() < 0.2 ? breakeven * (1.1 + rng.uniform())
                                             : breakeven * (0.2 + 0.6 * rng.uniform());
      k.cpc.push_back(cpc);
    }
  }
  double total_mean_cost = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      total_mean_cost += kws[i].demand * kws[i].ctr[j].mean * kws[i].cpc[j] / m;
    }
  }
  std::vector<AdGroupSpec> groups(m);
  for (int j = 0; j < m; ++j) {
    groups[j].id = "ag_" + std::to_string(j + 1);
    groups[j].budget = total_mean_cost / m * (0.25 + 0.5 * rng.uniform());
    groups[j].alpha = 0.8 + 0.15 * rng.uniform();
  }
  double theta = std::numeric_limits<double>::infinity();
  if (with_risk_bound) {
    ProblemInstance probe(kws, groups, 1.0);
    double wsum = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < m; ++j) wsum += probe.pair_variance(i, j) / m;
    }
    double total_budget = 0.0;
    for (const auto& g : groups) total_budget += g.budget;
    theta = wsum * (0.2 + 0.5 * rng.uniform()) / total_budget;
  }
  return ProblemInstance(std::move(kws), std::move(groups), theta);
}

}  // namespace testutil

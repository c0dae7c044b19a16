#include "kwgroup/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "kwgroup/bnb.hpp"
#include "kwgroup/normal.hpp"

namespace kwgroup {

const char* baseline_name(BaselineKind kind) {
  switch (kind) {
    case BaselineKind::SingleGroup: return "single_group";
    case BaselineKind::ProductLabels: return "product_labels";
    case BaselineKind::Clustered: return "clustered";
    case BaselineKind::HierarchyLabels: return "hierarchy_labels";
    case BaselineKind::Greedy: return "greedy";
  }
  return "?";
}

namespace {

int best_column(const ProblemInstance& inst, int i) {
  int best = 0;
  for (int j = 1; j < inst.m(); ++j) {
    if (inst.pair_profit(i, j) > inst.pair_profit(i, best)) best = j;
  }
  return best;
}

// Fills adgroups by decreasing budget from their candidate keyword lists,
// admitting positive-profit keywords in decreasing-profit order when the
// budget certificate still holds, and skipping past ones that do not fit.
Assignment admit(const ProblemInstance& inst,
                 const std::vector<std::vector<int>>& candidates) {
  Assignment out(inst.n(), inst.m());
  std::vector<int> group_order(inst.m());
  for (int j = 0; j < inst.m(); ++j) group_order[j] = j;
  std::stable_sort(group_order.begin(), group_order.end(), [&](int a, int b) {
    return inst.adgroup(a).budget > inst.adgroup(b).budget;
  });
  for (int j : group_order) {
    std::vector<int> order = candidates[j];
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return inst.pair_profit(a, j) > inst.pair_profit(b, j);
    });
    double kappa = normal_quantile(inst.adgroup(j).alpha);
    double budget = inst.adgroup(j).budget;
    double mu = 0.0, var = 0.0;
    for (int i : order) {
      if (inst.pair_profit(i, j) <= 0.0) break;
      if (out.column_of(i) != -1) continue;
      double sd = inst.cost_sd(i, j);
      double lhs = mu + inst.cost_mean(i, j) + kappa * std::sqrt(var + sd * sd);
      if (lhs > budget) continue;
      out.assign(i, j);
      mu += inst.cost_mean(i, j);
      var += sd * sd;
    }
  }
  return out;
}

BaselineRun merged_single_group(const ProblemInstance& inst) {
  // One adgroup holding the whole spend; it inherits the confidence level
  // of the largest budget. Each keyword keeps its most profitable column.
  int lead = 0;
  for (int j = 1; j < inst.m(); ++j) {
    if (inst.adgroup(j).budget > inst.adgroup(lead).budget) lead = j;
  }
  AdGroupSpec merged;
  merged.id = "merged";
  merged.budget = inst.total_budget();
  merged.alpha = inst.adgroup(lead).alpha;

  std::vector<KeywordStat> kws;
  kws.reserve(inst.n());
  for (int i = 0; i < inst.n(); ++i) {
    const KeywordStat& src = inst.keyword(i);
    int j = best_column(inst, i);
    KeywordStat k;
    k.id = src.id;
    k.demand = src.demand;
    k.value_per_sale = src.value_per_sale;
    k.ctr = {src.ctr[j]};
    k.cvr = {src.cvr[j]};
    k.cpc = {src.cpc[j]};
    k.cost = {src.cost[j]};
    k.product_label = src.product_label;
    k.hierarchy_label = src.hierarchy_label;
    kws.push_back(std::move(k));
  }
  ProblemInstance one(std::move(kws), {merged}, inst.risk_tolerance());
  std::vector<std::vector<int>> cands(1);
  for (int i = 0; i < one.n(); ++i) cands[0].push_back(i);
  Assignment asg = admit(one, cands);
  return BaselineRun{std::move(one), std::move(asg)};
}

// Maps keyword groups onto adgroups: groups ranked by total best-column
// profit take turns over adgroups ranked by budget.
std::vector<std::vector<int>> spread_groups(const ProblemInstance& inst,
                                            std::vector<std::vector<int>> groups) {
  std::vector<double> weight(groups.size(), 0.0);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (int i : groups[g]) {
      weight[g] += inst.pair_profit(i, best_column(inst, i));
    }
  }
  std::vector<int> group_rank(groups.size());
  for (std::size_t g = 0; g < groups.size(); ++g) group_rank[g] = static_cast<int>(g);
  std::stable_sort(group_rank.begin(), group_rank.end(),
                   [&](int a, int b) { return weight[a] > weight[b]; });
  std::vector<int> adgroup_order(inst.m());
  for (int j = 0; j < inst.m(); ++j) adgroup_order[j] = j;
  std::stable_sort(adgroup_order.begin(), adgroup_order.end(), [&](int a, int b) {
    return inst.adgroup(a).budget > inst.adgroup(b).budget;
  });
  std::vector<std::vector<int>> cands(inst.m());
  for (std::size_t r = 0; r < group_rank.size(); ++r) {
    int j = adgroup_order[r % adgroup_order.size()];
    for (int i : groups[group_rank[r]]) cands[j].push_back(i);
  }
  return cands;
}

BaselineRun by_label(const ProblemInstance& inst, bool product) {
  std::map<std::string, std::vector<int>> parts;
  for (int i = 0; i < inst.n(); ++i) {
    const auto& k = inst.keyword(i);
    const std::string& label = product ? k.product_label : k.hierarchy_label;
    if (label.empty()) {
      throw std::invalid_argument(std::string("baseline ") +
                                  (product ? "product_labels" : "hierarchy_labels") +
                                  ": keyword '" + k.id + "' has no label");
    }
    parts[label].push_back(i);
  }
  std::vector<std::vector<int>> groups;
  groups.reserve(parts.size());
  for (auto& [label, members] : parts) groups.push_back(std::move(members));
  Assignment asg = admit(inst, spread_groups(inst, std::move(groups)));
  return BaselineRun{inst, std::move(asg)};
}

BaselineRun by_cluster(const ProblemInstance& inst, std::uint64_t seed) {
  const int m = inst.m();
  std::vector<std::vector<double>> points;
  points.reserve(inst.n());
  for (int i = 0; i < inst.n(); ++i) {
    const auto& k = inst.keyword(i);
    double ctr = 0.0, cvr = 0.0, cpc = 0.0;
    for (int j = 0; j < m; ++j) {
      ctr += k.ctr[j].mean;
      cvr += k.cvr[j].mean;
      cpc += k.cpc[j];
    }
    points.push_back({k.demand, ctr / m, cpc / m, cvr / m, k.value_per_sale});
  }
  int k = std::min(m, inst.n());
  if (inst.n() == 0 || k == 0) {
    return BaselineRun{inst, Assignment(inst.n(), m)};
  }
  std::vector<int> labels = kmeans_labels(points, k, seed);
  std::vector<std::vector<int>> groups(k);
  for (int i = 0; i < inst.n(); ++i) groups[labels[i]].push_back(i);
  Assignment asg = admit(inst, spread_groups(inst, std::move(groups)));
  return BaselineRun{inst, std::move(asg)};
}

}  // namespace

BaselineRun run_baseline(BaselineKind kind, const ProblemInstance& inst,
                         std::uint64_t seed) {
  switch (kind) {
    case BaselineKind::SingleGroup:
      return merged_single_group(inst);
    case BaselineKind::ProductLabels:
      return by_label(inst, true);
    case BaselineKind::Clustered:
      return by_cluster(inst, seed);
    case BaselineKind::HierarchyLabels:
      return by_label(inst, false);
    case BaselineKind::Greedy:
      return BaselineRun{inst, greedy_assignment(inst)};
  }
  throw std::invalid_argument("run_baseline: unknown kind");
}

std::vector<int> kmeans_labels(const std::vector<std::vector<double>>& points,
                               int k, std::uint64_t seed) {
  const int n = static_cast<int>(points.size());
  if (k < 1 || k > n) throw std::invalid_argument("kmeans_labels: need 1 <= k <= n");
  const std::size_t dim = points[0].size();
  for (const auto& p : points) {
    if (p.size() != dim) throw std::invalid_argument("kmeans_labels: ragged points");
  }

  // Z-score per dimension; constant dimensions contribute nothing.
  std::vector<std::vector<double>> z(n, std::vector<double>(dim, 0.0));
  for (std::size_t d = 0; d < dim; ++d) {
    double mean = 0.0;
    for (const auto& p : points) mean += p[d];
    mean /= n;
    double ss = 0.0;
    for (const auto& p : points) ss += (p[d] - mean) * (p[d] - mean);
    double sd = std::sqrt(ss / n);
    if (sd > 0.0) {
      for (int i = 0; i < n; ++i) z[i][d] = (points[i][d] - mean) / sd;
    }
  }

  auto dist2 = [&](const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t d = 0; d < dim; ++d) s += (a[d] - b[d]) * (a[d] - b[d]);
    return s;
  };

  // D^2-weighted seeding.
  Rng rng(seed);
  std::vector<std::vector<double>> centers;
  centers.push_back(z[static_cast<int>(rng.below(static_cast<std::uint64_t>(n)))]);
  std::vector<double> d2(n, 0.0);
  while (static_cast<int>(centers.size()) < k) {
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& c : centers) best = std::min(best, dist2(z[i], c));
      d2[i] = best;
      total += best;
    }
    int pick = -1;
    if (total > 0.0) {
      double r = rng.uniform() * total;
      double acc = 0.0;
      for (int i = 0; i < n; ++i) {
        acc += d2[i];
        if (r < acc) {
          pick = i;
          break;
        }
      }
      if (pick < 0) pick = n - 1;
    } else {
      // All points coincide with a center; take the first free index.
      for (int i = 0; i < n && pick < 0; ++i) {
        bool used = false;
        for (const auto& c : centers) {
          if (dist2(z[i], c) == 0.0) used = true;
        }
        if (!used) pick = i;
      }
      if (pick < 0) pick = 0;
    }
    centers.push_back(z[pick]);
  }

  std::vector<int> labels(n, 0);
  for (int round = 0; round < 100; ++round) {
    bool changed = false;
    for (int i = 0; i < n; ++i) {
      int best = 0;
      double bd = dist2(z[i], centers[0]);
      for (int c = 1; c < k; ++c) {
        double d = dist2(z[i], centers[c]);
        if (d < bd) {
          bd = d;
          best = c;
        }
      }
      if (labels[i] != best) {
        labels[i] = best;
        changed = true;
      }
    }
    if (!changed && round > 0) break;
    for (int c = 0; c < k; ++c) {
      std::vector<double> mean(dim, 0.0);
      int count = 0;
      for (int i = 0; i < n; ++i) {
        if (labels[i] == c) {
          ++count;
          for (std::size_t d = 0; d < dim; ++d) mean[d] += z[i][d];
        }
      }
      if (count > 0) {
        for (std::size_t d = 0; d < dim; ++d) centers[c][d] = mean[d] / count;
      }
    }
  }
  return labels;
}

}  // namespace kwgroup

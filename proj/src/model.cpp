#include "kwgroup/model.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

#include "kwgroup/chance.hpp"

namespace kwgroup {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }

}  // namespace

Assignment::Assignment(int n, int m) : choice_(n, -1), m_(m) {
  if (n < 0 || m < 1) throw std::invalid_argument("Assignment: bad shape");
}

Assignment Assignment::from_matrix(const std::vector<int>& flat, int n, int m) {
  if (n < 0 || m < 1 || flat.size() != static_cast<std::size_t>(n) * m) {
    throw std::invalid_argument("Assignment::from_matrix: bad shape");
  }
  Assignment a(n, m);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      int v = flat[i * m + j];
      if (v != 0 && v != 1) {
        throw std::invalid_argument("Assignment::from_matrix: entries must be 0 or 1");
      }
      if (v == 1) {
        if (a.choice_[i] != -1) {
          throw std::invalid_argument(
              "Assignment::from_matrix: keyword assigned to several adgroups");
        }
        a.choice_[i] = j;
        ++a.n_assigned_;
      }
    }
  }
  return a;
}

void Assignment::assign(int i, int j) {
  if (i < 0 || i >= n() || j < 0 || j >= m_) {
    throw std::out_of_range("Assignment::assign: index out of range");
  }
  if (choice_[i] == -1) ++n_assigned_;
  choice_[i] = j;
}

void Assignment::unassign(int i) {
  if (i < 0 || i >= n()) throw std::out_of_range("Assignment::unassign");
  if (choice_[i] != -1) --n_assigned_;
  choice_[i] = -1;
}

std::vector<int> Assignment::column(int j) const {
  std::vector<int> col(choice_.size(), 0);
  for (std::size_t i = 0; i < choice_.size(); ++i) {
    if (choice_[i] == j) col[i] = 1;
  }
  return col;
}

std::vector<int> Assignment::to_matrix() const {
  std::vector<int> flat(choice_.size() * m_, 0);
  for (std::size_t i = 0; i < choice_.size(); ++i) {
    if (choice_[i] >= 0) flat[i * m_ + choice_[i]] = 1;
  }
  return flat;
}

bool Assignment::lex_less(const Assignment& other) const {
  return choice_ < other.choice_;
}

ProblemInstance::ProblemInstance(std::vector<KeywordStat> keywords,
                                 std::vector<AdGroupSpec> adgroups,
                                 double risk_tolerance)
    : keywords_(std::move(keywords)),
      adgroups_(std::move(adgroups)),
      risk_tolerance_(risk_tolerance) {
  require(!adgroups_.empty(), "instance: at least one adgroup required");
  require(risk_tolerance_ > 0.0 && !std::isnan(risk_tolerance_),
          "instance: risk tolerance must be positive (may be infinite)");
  std::set<std::string> seen;
  for (const auto& g : adgroups_) {
    require(!g.id.empty(), "adgroup: empty id");
    require(seen.insert(g.id).second, "adgroup: duplicate id '" + g.id + "'");
    require(std::isfinite(g.budget) && g.budget > 0.0,
            "adgroup '" + g.id + "': budget must be positive");
    require(g.alpha >= 0.5 && g.alpha < 1.0,
            "adgroup '" + g.id + "': alpha must lie in [0.5, 1)");
    total_budget_ += g.budget;
  }
  const int m = this->m();
  seen.clear();
  for (const auto& k : keywords_) {
    require(!k.id.empty(), "keyword: empty id");
    require(seen.insert(k.id).second, "keyword: duplicate id '" + k.id + "'");
    const std::string who = "keyword '" + k.id + "': ";
    require(finite_nonneg(k.demand), who + "demand must be nonnegative");
    require(finite_nonneg(k.value_per_sale), who + "value per sale must be nonnegative");
    require(k.ctr.size() == static_cast<std::size_t>(m) &&
                k.cvr.size() == static_cast<std::size_t>(m) &&
                k.cpc.size() == static_cast<std::size_t>(m),
            who + "per-adgroup vectors must have one entry per adgroup");
    require(k.cost.empty() || k.cost.size() == static_cast<std::size_t>(m),
            who + "spend moments must be absent or one per adgroup");
    for (int j = 0; j < m; ++j) {
      require(k.ctr[j].mean >= 0.0 && k.ctr[j].mean <= 1.0 && finite_nonneg(k.ctr[j].sd),
              who + "click-through moments out of range");
      require(k.cvr[j].mean >= 0.0 && k.cvr[j].mean <= 1.0 && finite_nonneg(k.cvr[j].sd),
              who + "conversion moments out of range");
      require(finite_nonneg(k.cpc[j]), who + "cost per click must be nonnegative");
      if (!k.cost.empty()) {
        require(finite_nonneg(k.cost[j].mean) && finite_nonneg(k.cost[j].sd),
                who + "spend moments out of range");
      }
    }
  }

  const int n = this->n();
  e_.resize(static_cast<std::size_t>(n) * m);
  w_.resize(e_.size());
  cost_mean_.resize(e_.size());
  cost_sd_.resize(e_.size());
  for (int i = 0; i < n; ++i) {
    auto& k = keywords_[i];
    const double d = k.demand;
    const double v = k.value_per_sale;
    bool derive = k.cost.empty();
    if (derive) k.cost.resize(m);
    for (int j = 0; j < m; ++j) {
      const double cm = k.ctr[j].mean, cs = k.ctr[j].sd;
      const double rm = k.cvr[j].mean, rs = k.cvr[j].sd;
      const double p = k.cpc[j];
      const double c2 = cm * cm + cs * cs;  // second moment of click-through
      const double r2 = rm * rm + rs * rs;
      e_[idx(i, j)] = d * (v * cm * rm - p * cm);
      w_[idx(i, j)] = d * d *
                      (v * v * (c2 * r2 - cm * cm * rm * rm) +
                       p * p * cs * cs - 2.0 * v * p * rm * cs * cs);
      if (derive) {
        k.cost[j] = Moments2{d * cm * p, d * cs * p};
      }
      cost_mean_[idx(i, j)] = k.cost[j].mean;
      cost_sd_[idx(i, j)] = k.cost[j].sd;
    }
  }
}

ProblemInstance ProblemInstance::with_budgets(const std::vector<double>& budgets) const {
  require(budgets.size() == adgroups_.size(),
          "with_budgets: one budget per adgroup required");
  auto groups = adgroups_;
  for (std::size_t j = 0; j < groups.size(); ++j) groups[j].budget = budgets[j];
  return ProblemInstance(keywords_, groups, risk_tolerance_);
}

ProblemInstance ProblemInstance::with_risk_tolerance(double theta) const {
  return ProblemInstance(keywords_, adgroups_, theta);
}

ProblemInstance ProblemInstance::with_alpha(double alpha) const {
  auto groups = adgroups_;
  for (auto& g : groups) g.alpha = alpha;
  return ProblemInstance(keywords_, groups, risk_tolerance_);
}

namespace {

void check_shape(const ProblemInstance& inst, const Assignment& x) {
  if (x.n() != inst.n() || x.m() != inst.m()) {
    throw std::invalid_argument("assignment shape does not match instance");
  }
}

}  // namespace

double expected_profit(const ProblemInstance& inst, const Assignment& x) {
  check_shape(inst, x);
  double total = 0.0;
  for (int i = 0; i < inst.n(); ++i) {
    int j = x.column_of(i);
    if (j >= 0) total += inst.pair_profit(i, j);
  }
  return total;
}

double profit_variance(const ProblemInstance& inst, const Assignment& x) {
  check_shape(inst, x);
  double total = 0.0;
  for (int i = 0; i < inst.n(); ++i) {
    int j = x.column_of(i);
    if (j >= 0) total += inst.pair_variance(i, j);
  }
  return total;
}

double expected_cost(const ProblemInstance& inst, const Assignment& x) {
  check_shape(inst, x);
  double total = 0.0;
  for (int i = 0; i < inst.n(); ++i) {
    int j = x.column_of(i);
    if (j >= 0) total += inst.cost_mean(i, j);
  }
  return total;
}

std::optional<double> return_on_investment(const ProblemInstance& inst,
                                           const Assignment& x) {
  double spend = expected_cost(inst, x);
  if (x.n_assigned() == 0 || spend <= 0.0) return std::nullopt;
  return expected_profit(inst, x) / spend;
}

bool risk_feasible(const ProblemInstance& inst, const Assignment& x) {
  double cap = inst.risk_tolerance() * inst.total_budget();
  return profit_variance(inst, x) <= cap;
}

AssignmentMetrics evaluate(const ProblemInstance& inst, const Assignment& x) {
  check_shape(inst, x);
  AssignmentMetrics out;
  out.expected_profit = expected_profit(inst, x);
  out.profit_variance = profit_variance(inst, x);
  out.expected_cost = expected_cost(inst, x);
  out.roi = return_on_investment(inst, x);
  out.n_assigned = x.n_assigned();
  out.adgroup_chance.resize(inst.m());
  for (int j = 0; j < inst.m(); ++j) {
    out.adgroup_chance[j] = analytic_chance(inst, x.column(j), j);
  }
  return out;
}

}  // namespace kwgroup

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace kwgroup {

/// Mean and standard deviation of one random quantity.
struct Moments2 {
  double mean = 0.0;
  double sd = 0.0;
};

/// Per-keyword inputs. Click-through and conversion moments, cost-per-click
/// and spend moments are stored per adgroup (one entry per column); demand
/// and value-per-sale are shared across columns.
struct KeywordStat {
  std::string id;
  double demand = 0.0;
  double value_per_sale = 0.0;
  std::vector<Moments2> ctr;   ///< click-through rate, one per adgroup
  std::vector<Moments2> cvr;   ///< conversion rate, one per adgroup
  std::vector<double> cpc;     ///< cost per click, one per adgroup
  /// Spend moments per adgroup. Leave empty to derive them from
  /// demand, click-through rate and cost per click.
  std::vector<Moments2> cost;
  std::string product_label;   ///< optional grouping label, "" when absent
  std::string hierarchy_label; ///< optional grouping label, "" when absent
};

/// One adgroup: identifier, period budget and the confidence level its
/// budget must hold with.
struct AdGroupSpec {
  std::string id;
  double budget = 0.0;
  double alpha = 0.95;
};

/// A keyword-to-adgroup assignment where each keyword is placed in at most
/// one adgroup. The one-adgroup-per-keyword rule is enforced structurally:
/// a row stores either the chosen column or "unassigned".
class Assignment {
 public:
  Assignment() = default;
  Assignment(int n, int m);

  /// Builds from a dense n*m row-major 0/1 matrix. Rejects entries other
  /// than 0 and 1 and rows selecting more than one column.
  static Assignment from_matrix(const std::vector<int>& flat, int n, int m);

  int n() const { return static_cast<int>(choice_.size()); }
  int m() const { return m_; }
  int n_assigned() const { return n_assigned_; }

  bool assigned(int i, int j) const { return choice_[i] == j; }
  /// Column index for keyword i, or -1 when unassigned.
  int column_of(int i) const { return choice_[i]; }

  void assign(int i, int j);
  void unassign(int i);

  /// 0/1 indicator vector for one column (length n).
  std::vector<int> column(int j) const;
  /// Dense n*m row-major 0/1 matrix.
  std::vector<int> to_matrix() const;

  bool operator==(const Assignment& other) const = default;

  /// Lexicographic order on the per-row column choices; used as the
  /// deterministic tie-break between equal-value assignments.
  bool lex_less(const Assignment& other) const;

 private:
  std::vector<int> choice_;  // per row: column index or -1
  int m_ = 0;
  int n_assigned_ = 0;
};

/// Validated problem data with precomputed per-pair profit moments and
/// spend moments. Immutable after construction.
class ProblemInstance {
 public:
  /// Validates shapes and ranges, derives missing spend moments, and
  /// precomputes e (expected profit), w (profit variance), and spend
  /// mean/sd for every keyword-adgroup pair.
  /// Throws std::invalid_argument on malformed input.
  ProblemInstance(std::vector<KeywordStat> keywords,
                  std::vector<AdGroupSpec> adgroups,
                  double risk_tolerance);

  int n() const { return static_cast<int>(keywords_.size()); }
  int m() const { return static_cast<int>(adgroups_.size()); }

  const KeywordStat& keyword(int i) const { return keywords_[i]; }
  const AdGroupSpec& adgroup(int j) const { return adgroups_[j]; }
  const std::vector<KeywordStat>& keywords() const { return keywords_; }
  const std::vector<AdGroupSpec>& adgroups() const { return adgroups_; }

  double risk_tolerance() const { return risk_tolerance_; }
  double total_budget() const { return total_budget_; }

  /// Expected profit contribution of placing keyword i in adgroup j.
  double pair_profit(int i, int j) const { return e_[idx(i, j)]; }
  /// Profit variance contribution of the same placement.
  double pair_variance(int i, int j) const { return w_[idx(i, j)]; }
  /// Expected spend of the placement.
  double cost_mean(int i, int j) const { return cost_mean_[idx(i, j)]; }
  /// Spend standard deviation of the placement.
  double cost_sd(int i, int j) const { return cost_sd_[idx(i, j)]; }

  /// Copy with different budgets (same adgroup ids and alphas).
  ProblemInstance with_budgets(const std::vector<double>& budgets) const;
  /// Copy with a different risk tolerance.
  ProblemInstance with_risk_tolerance(double theta) const;
  /// Copy with every adgroup set to the same confidence level.
  ProblemInstance with_alpha(double alpha) const;

 private:
  int idx(int i, int j) const { return i * m() + j; }

  std::vector<KeywordStat> keywords_;
  std::vector<AdGroupSpec> adgroups_;
  double risk_tolerance_ = 0.0;
  double total_budget_ = 0.0;
  std::vector<double> e_, w_, cost_mean_, cost_sd_;
};

/// Summary statistics of an assignment under an instance.
struct AssignmentMetrics {
  double expected_profit = 0.0;
  double profit_variance = 0.0;
  double expected_cost = 0.0;
  /// Expected profit over expected spend; empty when nothing is assigned.
  std::optional<double> roi;
  /// Analytic budget-compliance probability per adgroup.
  std::vector<double> adgroup_chance;
  int n_assigned = 0;
};

double expected_profit(const ProblemInstance& inst, const Assignment& x);
double profit_variance(const ProblemInstance& inst, const Assignment& x);
double expected_cost(const ProblemInstance& inst, const Assignment& x);
std::optional<double> return_on_investment(const ProblemInstance& inst,
                                           const Assignment& x);
/// Whether the variance-based risk bound (profit variance at most
/// risk_tolerance times total budget) holds.
bool risk_feasible(const ProblemInstance& inst, const Assignment& x);

AssignmentMetrics evaluate(const ProblemInstance& inst, const Assignment& x);

}  // namespace kwgroup

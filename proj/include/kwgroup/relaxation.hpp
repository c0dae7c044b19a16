#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "kwgroup/model.hpp"

namespace kwgroup {

/// Branching decisions applied to a subproblem: cells forced to one or to
/// zero. At most one cell per keyword may be forced to one, and no cell may
/// be forced both ways; violations throw std::invalid_argument.
class NodeFixings {
 public:
  NodeFixings(int n, int m);

  void fix_one(int i, int j);
  void fix_zero(int i, int j);
  /// Forces every cell of keyword i to zero (the keyword is dropped).
  void fix_row_zero(int i);

  bool is_fixed_one(int i, int j) const { return state_[idx(i, j)] == 1; }
  bool is_fixed_zero(int i, int j) const { return state_[idx(i, j)] == 2; }
  bool is_free(int i, int j) const { return state_[idx(i, j)] == 0; }
  /// Column keyword i is forced into, if any.
  std::optional<int> row_assigned(int i) const;

  int n() const { return n_; }
  int m() const { return m_; }

 private:
  int idx(int i, int j) const;

  int n_ = 0, m_ = 0;
  std::vector<signed char> state_;  // 0 free, 1 forced one, 2 forced zero
};

enum class RelaxStatus { Optimal, Infeasible, IterationLimit };

/// Lagrange multipliers of the continuous subproblem at the returned point,
/// in the units of the original maximization. Entries for eliminated
/// variables are zero; tests use these to verify stationarity over the
/// variables flagged in RelaxationResult::solved_free.
struct RelaxMultipliers {
  std::vector<double> box_lo;   ///< n*m, for x >= 0
  std::vector<double> box_hi;   ///< n*m, for x <= 1
  std::vector<double> row;      ///< n, for sum_j x_ij <= 1
  std::vector<double> budget;   ///< m, for the deterministic budget constraints
  double risk_sq = 0.0;         ///< for the variance risk bound
  double risk_lin = 0.0;        ///< for its linear strengthening
};

struct RelaxationResult {
  RelaxStatus status = RelaxStatus::Infeasible;
  /// n*m row-major point in [0, 1]; forced cells carry their forced value.
  std::vector<double> x;
  /// Objective value at x (expected profit, original units).
  double objective = 0.0;
  /// Certified upper bound on every integer assignment admissible under the
  /// fixings: objective + duality gap + tolerance margin. -infinity when the
  /// subproblem is infeasible, +infinity when iteration limits were hit.
  double upper_bound = 0.0;
  /// Scaled stationarity residual at x (gradient norm over problem scale).
  double kkt_residual = 0.0;
  int newton_iters = 0;
  /// 1 for variables optimized by the barrier solver, 0 for cells that were
  /// forced by fixings or eliminated in presolve.
  std::vector<unsigned char> solved_free;
  RelaxMultipliers multipliers;
};

struct RelaxOptions {
  double tol = 1e-8;
  /// Adds the linear strengthening of the risk bound (valid at 0/1 points).
  bool use_risk_cut = true;
  /// Solves the Newton systems by dense factorization instead of the
  /// structured low-rank path; slow, used as a reference in tests.
  bool force_dense = false;
  int max_outer = 80;
  int max_inner = 60;
};

/// Solves the continuous relaxation of the grouping problem restricted by
/// the fixings: maximize total expected profit over x in [0,1]^{n x m} with
/// at most one adgroup per keyword, deterministic-equivalent budget
/// constraints per adgroup, and the variance risk bound when the instance's
/// risk tolerance is finite.
///
/// Presolve removes variables that cannot be positive in any admissible
/// point (a single placement already overrunning its budget certificate or
/// the risk cap) and variables with nonpositive profit, which some optimum
/// always leaves at zero. The remaining problem is solved by a primal
/// log-barrier method with Newton steps; Newton systems use the problem's
/// row-block plus low-rank structure unless force_dense is set.
RelaxationResult solve_relaxation(const ProblemInstance& inst,
                                  const NodeFixings& fixings,
                                  const RelaxOptions& opts = {});

}  // namespace kwgroup

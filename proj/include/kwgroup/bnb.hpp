#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "kwgroup/chance.hpp"
#include "kwgroup/model.hpp"
#include "kwgroup/relaxation.hpp"

namespace kwgroup {

struct SolverConfig {
  std::int64_t node_limit = -1;   ///< maximum nodes to branch, -1 unlimited
  double time_limit_s = -1.0;     ///< wall-clock cap in seconds, -1 none
  std::uint64_t seed = 0;         ///< drives only the final compliance audit
  int workers = 1;                ///< parallel node evaluations per round
  /// Disables bound-based pruning (full enumeration); for testing.
  bool disable_pruning = false;
  /// Simulated budget-compliance audit of the returned assignment.
  bool run_chance_audit = true;
  std::int64_t audit_samples = 10000;
  double relax_tol = 1e-8;
  bool use_risk_cut = true;
  /// Test hook, called for every relaxation solved during the search with
  /// the node's fixings and the resulting upper bound.
  std::function<void(const NodeFixings&, double)> relax_trace;
};

struct SolveReport {
  Assignment best;
  double best_value = 0.0;
  AssignmentMetrics metrics;
  /// Simulated compliance per adgroup for the returned assignment; empty
  /// when the audit is disabled.
  std::vector<ChanceCheckResult> chance_audit;
  std::int64_t nodes_expanded = 0;
  bool proven_optimal = false;
  /// Absolute optimality gap at termination: largest open bound minus
  /// best_value, zero when proven optimal.
  double gap = 0.0;
};

/// Profit-greedy feasible assignment. Walks adgroups by decreasing budget;
/// within each, admits keywords by decreasing expected profit (positive
/// only), skipping any whose addition would break the adgroup's budget
/// certificate or the risk cap and continuing down the list.
Assignment greedy_assignment(const ProblemInstance& inst);

/// Exact best-first branch and bound over keyword-to-adgroup assignments.
///
/// Nodes branch on one keyword into one child per admissible adgroup plus a
/// rejection child. Each generated child is bounded by the continuous
/// relaxation and seeds the incumbent with a greedy completion; children
/// whose bound cannot beat the incumbent are pruned (unless disabled).
/// Keywords branch in decreasing best-profit order, children in decreasing
/// budget order, and equal-value incumbents resolve to the lexicographically
/// smallest assignment, making the search deterministic for a fixed
/// configuration. Without limits the returned value is the exact optimum
/// regardless of worker count.
SolveReport solve(const ProblemInstance& inst, const SolverConfig& cfg = {});

}  // namespace kwgroup

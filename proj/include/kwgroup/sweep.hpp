#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "kwgroup/baselines.hpp"
#include "kwgroup/model.hpp"

namespace kwgroup {

/// Which optimizer produces a sweep row.
enum class Approach {
  Solver,           ///< exact branch-and-bound search
  SingleGroup,
  ProductLabels,
  Clustered,
  HierarchyLabels,
  Greedy,
};

const char* approach_name(Approach a);
/// Inverse of approach_name; throws std::invalid_argument on unknown names.
Approach approach_from_name(const std::string& name);

struct SweepConfig {
  /// Total budgets to sweep over.
  std::vector<double> levels;
  /// Relative budget split across adgroups (normalized internally); must
  /// carry one weight per adgroup.
  std::vector<double> ratio;
  /// Risk tolerances to cross with the levels (may include infinity).
  std::vector<double> thetas;
  double alpha = 0.95;
  std::vector<Approach> approaches = {
      Approach::Solver,       Approach::SingleGroup, Approach::ProductLabels,
      Approach::Clustered,    Approach::HierarchyLabels, Approach::Greedy,
  };
  std::uint64_t seed = 0;
  /// Jobs run in parallel; results are identical for any worker count.
  int workers = 1;
  /// Solver limits applied per job (-1 = none).
  std::int64_t node_limit = -1;
  double time_limit_s = -1.0;
  /// Samples for the simulated compliance audit of each chosen assignment.
  std::int64_t audit_samples = 10000;
};

struct SweepRow {
  double level = 0.0;
  double theta = 0.0;
  Approach approach = Approach::Solver;
  std::string status = "ok";  ///< "ok" or the error that sank the job
  double profit = 0.0;
  std::optional<double> roi;
  double cost = 0.0;
  double variance = 0.0;
  int n_assigned = 0;
  double chance_min = 1.0;  ///< worst-case analytic compliance across adgroups
  double audit_min = 1.0;   ///< worst-case simulated compliance across adgroups
  bool proven_optimal = true;
  double gap = 0.0;
  std::int64_t nodes = 0;
};

/// Runs every (theta, level, approach) combination against copies of the
/// base instance re-budgeted to level * ratio and re-leveled to alpha.
/// Job seeds derive from the config seed and the job's position, so results
/// are byte-stable across runs and worker counts. A failing job yields a
/// row with its error in `status` rather than sinking the sweep.
std::vector<SweepRow> run_sweep(const ProblemInstance& base, const SweepConfig& cfg);

/// Writes rows as CSV: level, theta, approach, status, profit, roi, cost,
/// variance, n_assigned, chance_min, audit_min, proven_optimal, gap, nodes.
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);

}  // namespace kwgroup

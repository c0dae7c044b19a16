#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kwgroup/model.hpp"

namespace kwgroup {

/// Reference grouping strategies the exact solver is compared against.
enum class BaselineKind {
  SingleGroup,      ///< all budgets merged into one adgroup
  ProductLabels,    ///< partition by product label, groups spread over adgroups
  Clustered,        ///< k-means clusters on keyword features, one per adgroup
  HierarchyLabels,  ///< partition by account-hierarchy label
  Greedy,           ///< profit-greedy admission straight into the adgroups
};

const char* baseline_name(BaselineKind kind);

/// A baseline's outcome. SingleGroup rewrites the instance (one merged
/// adgroup, per-keyword best column); all other kinds keep the input
/// instance. The assignment always refers to `instance`.
struct BaselineRun {
  ProblemInstance instance;
  Assignment assignment;
};

/// Runs one baseline strategy. Label-based kinds require the corresponding
/// label on every keyword and throw std::invalid_argument otherwise. Only
/// Greedy honors the instance's risk tolerance; the label, cluster, and
/// merged strategies fill budgets on expected profit alone, mirroring how
/// such groupings are built in practice.
BaselineRun run_baseline(BaselineKind kind, const ProblemInstance& inst,
                         std::uint64_t seed);

/// Lloyd k-means on z-score-standardized points with greedy D^2 seeding.
/// Deterministic for a fixed seed; ties in assignment go to the lowest
/// cluster index. Returns a label in [0, k) per point.
std::vector<int> kmeans_labels(const std::vector<std::vector<double>>& points,
                               int k, std::uint64_t seed);

}  // namespace kwgroup

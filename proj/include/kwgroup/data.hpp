#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "kwgroup/model.hpp"

namespace kwgroup {

/// One period of observed performance for one keyword.
struct ReportRow {
  std::string keyword_id;
  std::string period;
  long long impressions = 0;
  long long clicks = 0;
  long long conversions = 0;
  double cost = 0.0;
  double revenue = 0.0;
  std::string product_label;
  std::string hierarchy_label;
};

/// Non-fatal findings produced while estimating or generating data.
struct Diagnostics {
  std::vector<std::string> warnings;
  void warn(std::string msg) { warnings.push_back(std::move(msg)); }
};

/// Population mean and standard deviation a generated variable aims for.
struct VariableTarget {
  double mean = 0.0;
  double sd = 0.0;
};

/// Controls synthetic instance generation.
///
/// Demand, value per sale, and cost per click are lognormal with the target
/// moments. Click-through and conversion rates are normals clipped to
/// [0, 1], calibrated so the *clipped* variable matches the target moments
/// (a standard-deviation target no [0,1] variable can reach is clamped with
/// a warning). Demand and click-through rate share a Gaussian copula whose
/// anti-correlation is calibrated so the population mean spend per keyword
/// hits cost_mean; rare terms draw high demand, head terms low demand.
struct GeneratorSpec {
  int n = 90;
  int m = 2;
  VariableTarget demand{1211.90, 2296.07};
  VariableTarget ctr{0.04, 0.15};
  VariableTarget cvr{0.53, 0.37};
  VariableTarget vps{16.31, 14.64};
  VariableTarget cpc{0.30, 0.08};
  /// Target population mean of per-keyword spend; nonpositive disables the
  /// demand/click-through coupling.
  double cost_mean = 2.13;
  /// Within-keyword relative dispersion: each keyword's rate standard
  /// deviation is noise_rel times its own mean rate.
  double noise_rel = 0.15;
  /// Per-adgroup click-through multipliers (empty = all ones).
  std::vector<double> ctr_scale;
  /// Per-adgroup budgets (empty = total of 10000 split evenly).
  std::vector<double> budgets;
  double alpha = 0.95;
  double risk_tolerance = std::numeric_limits<double>::infinity();
  /// Number of distinct product / hierarchy labels (0 = pick from m).
  int product_label_count = 0;
  int hierarchy_label_count = 0;
  std::uint64_t seed = 1;

  /// 90 keywords over two adgroups; moderate demand skew, strong
  /// demand-rate anticorrelation, cheap clicks.
  static GeneratorSpec preset_small();
  /// 305 keywords over three adgroups; extreme skew and expensive clicks.
  static GeneratorSpec preset_large();
};

/// Builds a reproducible synthetic instance per the spec. Reports
/// calibration clamps, heavy clipping, and keywords too small for the
/// normal spend approximation through diag (when given).
/// Throws std::invalid_argument on unsatisfiable or malformed targets.
ProblemInstance generate(const GeneratorSpec& spec, Diagnostics* diag = nullptr);

/// Estimates per-keyword statistics from period-level reports: demand as
/// mean impressions, rates as per-period ratios (mean and sample sd),
/// value per sale and cost per click as ratio-of-totals, and spend moments
/// from the per-period cost column. Statistics are replicated across the m
/// adgroup columns. Keywords appear in first-seen order.
std::vector<KeywordStat> estimate_stats(const std::vector<ReportRow>& rows,
                                        int m, Diagnostics* diag = nullptr);

namespace detail {

/// Moments of a normal(a, b^2) variable clipped to [0, 1].
double clipped_mean(double a, double b);
double clipped_sd(double a, double b);
/// Fraction of mass landing on either clip boundary.
double clipped_fraction(double a, double b);
/// Finds (a, b) so the clipped variable matches (mean, sd); sd targets
/// beyond reach are clamped (flagged through the return value).
struct ClipFit {
  double a = 0.0;
  double b = 0.0;
  bool sd_clamped = false;
  double sd_reached = 0.0;
};
ClipFit fit_clipped(double mean, double sd);

}  // namespace detail

}  // namespace kwgroup

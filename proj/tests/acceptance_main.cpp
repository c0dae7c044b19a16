// Acceptance gate for the keyword grouping artifact.
//
// Each numbered criterion prints exactly one [PASS]/[FAIL] line with its
// pinned tolerances; the exit status is the number of failed criteria.
// Slow sections (the benchmark sweeps) run last so the cheap oracles fail
// fast when something is broken.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "kwgroup/bnb.hpp"
#include "kwgroup/chance.hpp"
#include "kwgroup/csv.hpp"
#include "kwgroup/data.hpp"
#include "kwgroup/model.hpp"
#include "kwgroup/normal.hpp"
#include "kwgroup/relaxation.hpp"
#include "kwgroup/sweep.hpp"

#include "test_util.hpp"

using namespace kwgroup;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double now_seconds() {
  using clock = std::chrono::steady_clock;
  static const clock::time_point start = clock::now();
  return std::chrono::duration<double>(clock::now() - start).count();
}

// ---------------------------------------------------------------------------
// shared fixtures

// The 50-instance oracle suite: n in 4..8, m in {1,2}, confidence 0.95,
// alternating between an unbounded and a tight risk tolerance.
ProblemInstance suite_instance(int k) {
  Rng rng(mix_seed(410, static_cast<std::uint64_t>(k)));
  const int n = 4 + (k % 5);
  const int m = 1 + ((k / 5) % 2);
  const double theta = (k % 2 == 1) ? 0.3 : kInf;
  return testutil::random_instance(rng, n, m, false)
      .with_alpha(0.95)
      .with_risk_tolerance(theta);
}

// Single-adgroup instance whose spend moments are given directly, so the
// budget checks are exercised on arbitrary normal costs.
ProblemInstance spend_only_instance(Rng& rng, int n, double budget, double alpha) {
  std::vector<KeywordStat> kws(n);
  for (int i = 0; i < n; ++i) {
    KeywordStat& k = kws[i];
    k.id = "kw" + std::to_string(i + 1);
    k.demand = 1.0;
    k.value_per_sale = 1.0;
    k.ctr = {{0.5, 0.0}};
    k.cvr = {{0.5, 0.0}};
    k.cpc = {1.0};
    const double mu = rng.uniform(0.05, 4.0);
    const double sd = rng.uniform() < 0.2 ? 0.0 : rng.uniform(0.01, 1.5);
    k.cost = {{mu, sd}};
  }
  std::vector<AdGroupSpec> groups{{"g1", budget, alpha}};
  return ProblemInstance(std::move(kws), std::move(groups), kInf);
}

// Feasibility judged from the analytic compliance probability rather than
// the solver's own certificate, so the enumeration is an independent oracle.
bool oracle_feasible(const ProblemInstance& inst, const Assignment& x) {
  for (int j = 0; j < inst.m(); ++j) {
    if (analytic_chance(inst, x.column(j), j) < inst.adgroup(j).alpha) return false;
  }
  if (std::isfinite(inst.risk_tolerance()) &&
      profit_variance(inst, x) > inst.risk_tolerance() * inst.total_budget()) {
    return false;
  }
  return true;
}

double enumerate_optimum(const ProblemInstance& inst) {
  const int n = inst.n();
  const int m = inst.m();
  std::vector<int> choice(n, -1);
  double best = -kInf;
  while (true) {
    Assignment x(n, m);
    for (int i = 0; i < n; ++i) {
      if (choice[i] >= 0) x.assign(i, choice[i]);
    }
    if (oracle_feasible(inst, x)) best = std::max(best, expected_profit(inst, x));
    int i = n - 1;
    while (i >= 0 && choice[i] == m - 1) {
      choice[i] = -1;
      --i;
    }
    if (i < 0) break;
    ++choice[i];
  }
  return best;
}

// ---------------------------------------------------------------------------
// criteria

bool criterion_exact_search(std::string& detail) {
  double worst_rel = 0.0;
  double worst_time = 0.0;
  int bad = 0;
  for (int k = 0; k < 50; ++k) {
    const ProblemInstance inst = suite_instance(k);
    SolverConfig cfg;
    cfg.run_chance_audit = false;
    const double t0 = now_seconds();
    const SolveReport rep = solve(inst, cfg);
    const double dt = now_seconds() - t0;
    const double oracle = enumerate_optimum(inst);
    const double rel =
        std::abs(rep.best_value - oracle) / std::max(1.0, std::abs(oracle));
    worst_rel = std::max(worst_rel, rel);
    worst_time = std::max(worst_time, dt);
    if (rel > 1e-9 || dt >= 10.0 || !rep.proven_optimal) ++bad;
  }
  std::ostringstream os;
  os << "50 seeded instances vs full enumeration, worst relative error " << worst_rel
     << " (limit 1e-9), slowest solve " << worst_time << "s (limit 10s), " << bad
     << " failures";
  detail = os.str();
  return bad == 0;
}

bool criterion_certificate_identity(std::string& detail) {
  int agree = 0;
  for (int t = 0; t < 1000; ++t) {
    Rng rng(mix_seed(420, static_cast<std::uint64_t>(t)));
    const double budget = rng.uniform(0.2, 25.0);
    const double alpha = rng.uniform(0.5, 0.99);
    const ProblemInstance inst = spend_only_instance(rng, 10, budget, alpha);
    std::vector<int> col(10);
    for (auto& c : col) c = rng.uniform() < 0.5 ? 1 : 0;
    const double lhs = deterministic_budget_lhs(inst, col, 0);
    const double chance = analytic_chance(inst, col, 0);
    const bool certified = lhs <= budget;
    const bool compliant = chance >= alpha;
    if (certified == compliant || std::abs(lhs - budget) <= 1e-9 * std::max(1.0, budget)) {
      ++agree;
    }
  }
  std::ostringstream os;
  os << agree << " of 1000 random columns agree (boundary tolerance 1e-9)";
  detail = os.str();
  return agree == 1000;
}

bool criterion_simulation_agreement(std::string& detail) {
  const std::int64_t samples = 1000000;
  int within = 0;
  double worst = 0.0;
  for (int t = 0; t < 200; ++t) {
    Rng rng(mix_seed(430, static_cast<std::uint64_t>(t)));
    const double budget = rng.uniform(0.5, 12.0);
    const double alpha = rng.uniform(0.5, 0.99);
    const ProblemInstance inst = spend_only_instance(rng, 6, budget, alpha);
    std::vector<int> col(6);
    for (auto& c : col) c = rng.uniform() < 0.5 ? 1 : 0;
    const double truth = analytic_chance(inst, col, 0);
    const ChanceCheckResult sim =
        simulate_chance(inst, col, 0, {samples, mix_seed(431, static_cast<std::uint64_t>(t))});
    const double dev = std::abs(sim.alpha_hat - truth);
    worst = std::max(worst, dev);
    if (dev <= 0.004) ++within;
  }

  // pinned single-keyword case: budget placed exactly at the 95% quantile
  KeywordStat k;
  k.id = "kw";
  k.demand = 1.0;
  k.value_per_sale = 1.0;
  k.ctr = {{0.5, 0.0}};
  k.cvr = {{0.5, 0.0}};
  k.cpc = {1.0};
  k.cost = {{2.13, 3.67}};
  const double budget = 2.13 + normal_quantile(0.95) * 3.67;
  std::vector<AdGroupSpec> groups{{"g1", budget, 0.95}};
  const ProblemInstance one({k}, groups, kInf);
  const ChanceCheckResult pin = simulate_chance(one, {1}, 0, {samples, 20260822});
  const double pin_dev = std::abs(pin.alpha_hat - 0.95);

  std::ostringstream os;
  os << within << " of 200 columns within 0.004 at 1e6 samples (need 198), "
     << "pinned case deviation " << pin_dev << " (limit 0.002)";
  detail = os.str();
  return within >= 198 && pin_dev <= 0.002;
}

bool criterion_bound_validity(std::string& detail) {
  long long traces_checked = 0;
  int violations = 0;
  int reopt_mismatch = 0;
  double worst_margin = kInf;
  for (int k = 0; k < 50; ++k) {
    const ProblemInstance inst = suite_instance(k);
    std::vector<std::pair<NodeFixings, double>> traces;
    SolverConfig cfg;
    cfg.run_chance_audit = false;
    cfg.relax_trace = [&traces](const NodeFixings& f, double ub) {
      traces.emplace_back(f, ub);
    };
    const SolveReport rep = solve(inst, cfg);
    for (const auto& [fix, ub] : traces) {
      const double sub = testutil::brute_force_under(inst, fix);
      if (!std::isfinite(sub)) continue;  // no feasible completion in the subtree
      ++traces_checked;
      const double scale = std::max(1.0, std::abs(sub));
      worst_margin = std::min(worst_margin, (ub - sub) / scale);
      if (ub - sub < -1e-6 * scale) ++violations;
    }
    SolverConfig full;
    full.run_chance_audit = false;
    full.disable_pruning = true;
    const SolveReport rep2 = solve(inst, full);
    if (std::abs(rep2.best_value - rep.best_value) >
        1e-9 * std::max(1.0, std::abs(rep.best_value))) {
      ++reopt_mismatch;
    }
  }
  std::ostringstream os;
  os << traces_checked << " relaxation bounds vs subtree optima, " << violations
     << " below -1e-6 relative (worst margin " << worst_margin << "), "
     << reopt_mismatch << " optimum changes with pruning disabled";
  detail = os.str();
  return violations == 0 && reopt_mismatch == 0;
}

bool criterion_variance_oracle(std::string& detail) {
  const int samples = 1000000;
  double worst_rel = 0.0;
  int bad = 0;

  auto analytic_instance = [](Rng& rng, int n) {
    std::vector<KeywordStat> kws(n);
    for (int i = 0; i < n; ++i) {
      KeywordStat& k = kws[i];
      k.id = "kw" + std::to_string(i + 1);
      k.demand = rng.uniform(1.0, 10.0);
      k.value_per_sale = rng.uniform(1.0, 5.0);
      k.ctr = {{rng.uniform(0.2, 0.7), rng.uniform(0.05, 0.15)}};
      k.cvr = {{rng.uniform(0.2, 0.7), rng.uniform(0.05, 0.15)}};
      k.cpc = {rng.uniform(0.1, 1.0)};
    }
    std::vector<AdGroupSpec> groups{{"g1", 1e9, 0.95}};
    return ProblemInstance(std::move(kws), std::move(groups), kInf);
  };

  // profit draw for keyword i in its single column under the moment model
  auto draw_profit = [](const KeywordStat& k, Rng& rng) {
    const double c = k.ctr[0].mean + k.ctr[0].sd * rng.standard_normal();
    const double r = k.cvr[0].mean + k.cvr[0].sd * rng.standard_normal();
    return k.demand * c * (k.value_per_sale * r - k.cpc[0]);
  };

  auto run_case = [&](const ProblemInstance& inst, double analytic, Rng& rng) {
    double sum = 0.0, sumsq = 0.0;
    for (int s = 0; s < samples; ++s) {
      double prof = 0.0;
      for (int i = 0; i < inst.n(); ++i) prof += draw_profit(inst.keyword(i), rng);
      sum += prof;
      sumsq += prof * prof;
    }
    const double mean = sum / samples;
    const double mc = (sumsq - samples * mean * mean) / (samples - 1);
    const double rel = std::abs(mc - analytic) / std::max(analytic, 1e-9);
    worst_rel = std::max(worst_rel, rel);
    if (rel > 0.02) ++bad;
  };

  for (int t = 0; t < 100; ++t) {
    Rng rng(mix_seed(550, static_cast<std::uint64_t>(t)));
    const ProblemInstance inst = analytic_instance(rng, 1);
    run_case(inst, inst.pair_variance(0, 0), rng);
  }
  for (int t = 0; t < 20; ++t) {
    Rng rng(mix_seed(551, static_cast<std::uint64_t>(t)));
    const ProblemInstance inst = analytic_instance(rng, 5);
    Assignment x(inst.n(), inst.m());
    for (int i = 0; i < inst.n(); ++i) x.assign(i, 0);
    run_case(inst, profit_variance(inst, x), rng);
  }
  std::ostringstream os;
  os << "100 single placements and 20 portfolios at 1e6 samples, worst relative gap "
     << worst_rel << " (limit 0.02), " << bad << " failures";
  detail = os.str();
  return bad == 0;
}

struct TrendCheck {
  int status_bad = 0;
  int dominance_miss = 0;
  int roi_miss = 0;
  int monotone_miss = 0;
  int gap_bad = 0;
  double worst_gap = 0.0;
};

const SweepRow* find_row(const std::vector<SweepRow>& rows, double level, double theta,
                         Approach ap) {
  for (const SweepRow& r : rows) {
    if (r.level == level && r.theta == theta && r.approach == ap) return &r;
  }
  return nullptr;
}

void check_trends(const std::vector<SweepRow>& rows, const std::vector<double>& levels,
                  bool limits_allowed, TrendCheck& tc) {
  for (const SweepRow& r : rows) {
    if (r.status != "ok") ++tc.status_bad;
  }
  const Approach baselines[] = {Approach::SingleGroup, Approach::ProductLabels,
                                Approach::Clustered, Approach::HierarchyLabels,
                                Approach::Greedy};
  for (double level : levels) {
    const SweepRow* s = find_row(rows, level, kInf, Approach::Solver);
    if (!s) {
      ++tc.status_bad;
      continue;
    }
    for (Approach ap : baselines) {
      const SweepRow* r = find_row(rows, level, kInf, ap);
      if (!r) {
        ++tc.status_bad;
        continue;
      }
      if (!(s->profit >= r->profit - 1e-6 * std::max(1.0, std::abs(s->profit)))) {
        ++tc.dominance_miss;
      }
      if (r->roi) {
        if (!s->roi) {
          ++tc.roi_miss;
        } else if (!(*s->roi >= *r->roi - 1e-6 * std::max(1.0, std::abs(*s->roi)))) {
          ++tc.roi_miss;
        }
      }
    }
    if (!s->proven_optimal) {
      const double relgap = s->gap / std::max(1.0, std::abs(s->profit));
      tc.worst_gap = std::max(tc.worst_gap, relgap);
      if (!limits_allowed || relgap > 0.02) ++tc.gap_bad;
    }
  }
  const Approach all[] = {Approach::Solver,    Approach::SingleGroup,
                          Approach::ProductLabels, Approach::Clustered,
                          Approach::HierarchyLabels, Approach::Greedy};
  for (Approach ap : all) {
    const SweepRow* prev = nullptr;
    for (double level : levels) {
      const SweepRow* r = find_row(rows, level, kInf, ap);
      if (!r) continue;
      if (prev &&
          !(r->profit >= prev->profit - 1e-6 * std::max(1.0, std::abs(prev->profit)))) {
        ++tc.monotone_miss;
      }
      prev = r;
    }
  }
}

bool criterion_benchmark_trends(const ProblemInstance& t2, const ProblemInstance& t3,
                                std::string& detail) {
  std::vector<double> levels2;
  for (int level = 2000; level <= 20000; level += 2000) levels2.push_back(level);
  std::vector<double> levels3;
  for (int level = 10000; level <= 70000; level += 10000) levels3.push_back(level);

  SweepConfig a;
  a.levels = levels2;
  a.ratio = {2.0, 1.0};
  a.thetas = {kInf};
  a.alpha = 0.95;
  a.seed = 2026;
  a.workers = 1;
  a.audit_samples = 2000;

  SweepConfig b = a;
  b.levels = levels3;
  b.ratio = {3.0, 2.0, 1.0};
  b.time_limit_s = 120.0;  // limits are allowed on the large instance only

  const double t0 = now_seconds();
  const std::vector<SweepRow> rows2 = run_sweep(t2, a);
  const std::vector<SweepRow> rows3 = run_sweep(t3, b);
  const double dt = now_seconds() - t0;

  TrendCheck tc;
  check_trends(rows2, levels2, false, tc);
  check_trends(rows3, levels3, true, tc);

  std::ostringstream os;
  os << "two calibrated sweeps (10 + 7 levels, 6 approaches): " << tc.dominance_miss
     << " profit and " << tc.roi_miss << " roi dominance misses, " << tc.monotone_miss
     << " monotonicity breaks (tolerance 1e-6 relative), " << tc.status_bad
     << " bad rows, worst large-instance gap " << tc.worst_gap
     << " (limit 0.02), runtime " << dt << "s (limit 1800s)";
  detail = os.str();
  return tc.status_bad == 0 && tc.dominance_miss == 0 && tc.roi_miss == 0 &&
         tc.monotone_miss == 0 && tc.gap_bad == 0 && dt < 1800.0;
}

bool criterion_risk_ordering(const ProblemInstance& t2, std::string& detail) {
  std::vector<double> levels;
  for (int level = 2000; level <= 20000; level += 2000) levels.push_back(level);
  SweepConfig cfg;
  cfg.levels = levels;
  cfg.ratio = {2.0, 1.0};
  cfg.thetas = {kInf, 0.3};
  cfg.approaches = {Approach::Solver, Approach::Greedy};
  cfg.alpha = 0.95;
  cfg.seed = 2026;
  cfg.workers = 1;
  cfg.audit_samples = 2000;
  const std::vector<SweepRow> rows = run_sweep(t2, cfg);

  int status_bad = 0;
  int relax_miss = 0;
  int greedy_miss = 0;
  for (const SweepRow& r : rows) {
    if (r.status != "ok") ++status_bad;
  }
  for (double level : levels) {
    const SweepRow* loose = find_row(rows, level, kInf, Approach::Solver);
    const SweepRow* tight = find_row(rows, level, 0.3, Approach::Solver);
    const SweepRow* greedy = find_row(rows, level, 0.3, Approach::Greedy);
    if (!loose || !tight || !greedy) {
      ++status_bad;
      continue;
    }
    if (!(loose->profit >= tight->profit - 1e-6 * std::max(1.0, std::abs(loose->profit)))) {
      ++relax_miss;
    }
    if (!(tight->profit >= greedy->profit - 1e-6 * std::max(1.0, std::abs(tight->profit)))) {
      ++greedy_miss;
    }
  }
  std::ostringstream os;
  os << "10 levels: " << relax_miss
     << " levels where loosening the risk bound lost profit, " << greedy_miss
     << " levels where the bounded optimum trailed greedy (tolerance 1e-6 relative), "
     << status_bad << " bad rows";
  detail = os.str();
  return status_bad == 0 && relax_miss == 0 && greedy_miss == 0;
}

bool criterion_determinism(std::string& detail) {
  GeneratorSpec spec = GeneratorSpec::preset_small();
  spec.n = 40;
  spec.seed = 9;
  const ProblemInstance inst = generate(spec);

  // lossless generate -> serialize -> ingest
  std::ostringstream kw1, gr1;
  write_instance_csv(kw1, inst.keywords(), inst.m());
  write_adgroups_csv(gr1, inst.adgroups());
  std::istringstream kin(kw1.str()), gin(gr1.str());
  const InstanceData back = read_instance_csv(kin);
  const std::vector<AdGroupSpec> groups = read_adgroups_csv(gin);
  const ProblemInstance round(back.keywords, groups, inst.risk_tolerance());
  std::ostringstream kw2, gr2;
  write_instance_csv(kw2, round.keywords(), round.m());
  write_adgroups_csv(gr2, round.adgroups());
  bool lossless = kw1.str() == kw2.str() && gr1.str() == gr2.str() &&
                  round.n() == inst.n() && round.m() == inst.m();
  if (lossless) {
    for (int i = 0; i < inst.n() && lossless; ++i) {
      for (int j = 0; j < inst.m(); ++j) {
        lossless = lossless && inst.pair_profit(i, j) == round.pair_profit(i, j) &&
                   inst.pair_variance(i, j) == round.pair_variance(i, j) &&
                   inst.cost_mean(i, j) == round.cost_mean(i, j) &&
                   inst.cost_sd(i, j) == round.cost_sd(i, j);
      }
    }
  }

  // byte-identical sweep output across repeat runs and worker counts
  SweepConfig cfg;
  cfg.levels = {40.0, 90.0};
  cfg.ratio = {2.0, 1.0};
  cfg.thetas = {kInf, 0.3};
  cfg.alpha = 0.95;
  cfg.seed = 7;
  cfg.audit_samples = 1000;
  auto csv_of = [&](int workers) {
    SweepConfig c = cfg;
    c.workers = workers;
    std::ostringstream os;
    write_sweep_csv(os, run_sweep(inst, c));
    return os.str();
  };
  const std::string first = csv_of(1);
  const std::string again = csv_of(1);
  const std::string wide = csv_of(8);
  const bool stable = first == again && first == wide;

  std::ostringstream os;
  os << "serialize/ingest round trip " << (lossless ? "lossless" : "LOSSY")
     << " (exact equality), sweep bytes " << (stable ? "identical" : "DIFFER")
     << " across two runs and worker counts 1 and 8";
  detail = os.str();
  return lossless && stable;
}

}  // namespace

int main() {
  now_seconds();  // pin the clock origin
  std::printf("keyword grouping acceptance suite\n");
  std::fflush(stdout);

  int failures = 0;
  auto grade = [&failures](int num, const char* label, bool ok, const std::string& detail) {
    std::printf("[%s] %d %s: %s\n", ok ? "PASS" : "FAIL", num, label, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
  };
  auto run = [&grade](int num, const char* label, auto&& fn) {
    std::string detail;
    bool ok = false;
    try {
      ok = fn(detail);
    } catch (const std::exception& e) {
      ok = false;
      detail = std::string("exception: ") + e.what();
    }
    grade(num, label, ok, detail);
  };

  run(1, "exact search equals exhaustive enumeration", criterion_exact_search);
  run(2, "budget certificate equals analytic compliance", criterion_certificate_identity);
  run(3, "simulated compliance tracks the analytic value", criterion_simulation_agreement);
  run(4, "relaxation bounds dominate subtree optima", criterion_bound_validity);
  run(5, "variance formula tracks simulation", criterion_variance_oracle);

  GeneratorSpec small = GeneratorSpec::preset_small();
  small.seed = 1;
  GeneratorSpec large = GeneratorSpec::preset_large();
  large.seed = 1;
  const ProblemInstance bench_small = generate(small);
  const ProblemInstance bench_large = generate(large);

  run(6, "optimizer dominates baselines with monotone profits",
      [&](std::string& d) { return criterion_benchmark_trends(bench_small, bench_large, d); });
  run(7, "risk tolerance ordering", [&](std::string& d) {
    return criterion_risk_ordering(bench_small, d);
  });
  run(8, "byte stable sweeps and lossless round trip", criterion_determinism);

  if (failures == 0) {
    std::printf("all 8 criteria passed (%.1fs)\n", now_seconds());
  } else {
    std::printf("%d of 8 criteria failed (%.1fs)\n", failures, now_seconds());
  }
  return failures;
}

#include "kwgroup/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "kwgroup/bnb.hpp"
#include "kwgroup/chance.hpp"
#include "kwgroup/csv.hpp"
#include "kwgroup/normal.hpp"

namespace kwgroup {

const char* approach_name(Approach a) {
  switch (a) {
    case Approach::Solver: return "solver";
    case Approach::SingleGroup: return "single_group";
    case Approach::ProductLabels: return "product_labels";
    case Approach::Clustered: return "clustered";
    case Approach::HierarchyLabels: return "hierarchy_labels";
    case Approach::Greedy: return "greedy";
  }
  throw std::invalid_argument("approach_name: bad enum value");
}

Approach approach_from_name(const std::string& name) {
  for (Approach a : {Approach::Solver, Approach::SingleGroup, Approach::ProductLabels,
                     Approach::Clustered, Approach::HierarchyLabels, Approach::Greedy}) {
    if (name == approach_name(a)) return a;
  }
  throw std::invalid_argument("unknown approach: " + name);
}

namespace {

struct Job {
  double level = 0.0;
  double theta = 0.0;
  Approach approach = Approach::Solver;
  std::size_t index = 0;  // position in the enumeration, seeds derive from it
};

BaselineKind baseline_of(Approach a) {
  switch (a) {
    case Approach::SingleGroup: return BaselineKind::SingleGroup;
    case Approach::ProductLabels: return BaselineKind::ProductLabels;
    case Approach::Clustered: return BaselineKind::Clustered;
    case Approach::HierarchyLabels: return BaselineKind::HierarchyLabels;
    case Approach::Greedy: return BaselineKind::Greedy;
    case Approach::Solver: break;
  }
  throw std::logic_error("baseline_of: solver is not a baseline");
}

// Worst-case compliance of one assignment across adgroups, both analytically
// and by simulation. Adgroups with nothing assigned trivially comply.
void audit_row(const ProblemInstance& inst, const Assignment& asg,
               std::int64_t samples, std::uint64_t seed, SweepRow& row) {
  row.chance_min = 1.0;
  row.audit_min = 1.0;
  for (int j = 0; j < inst.m(); ++j) {
    const std::vector<int> column = asg.column(j);
    row.chance_min = std::min(row.chance_min, analytic_chance(inst, column, j));
    ChanceCheckConfig cc;
    cc.samples = samples;
    cc.seed = mix_seed(seed, 0x5eedULL + static_cast<std::uint64_t>(j));
    row.audit_min = std::min(row.audit_min, simulate_chance(inst, column, j, cc).alpha_hat);
  }
}

SweepRow run_job(const ProblemInstance& base, const SweepConfig& cfg, const Job& job) {
  SweepRow row;
  row.level = job.level;
  row.theta = job.theta;
  row.approach = job.approach;

  const double ratio_sum = std::accumulate(cfg.ratio.begin(), cfg.ratio.end(), 0.0);
  std::vector<double> budgets(cfg.ratio.size());
  for (std::size_t j = 0; j < budgets.size(); ++j) {
    budgets[j] = job.level * cfg.ratio[j] / ratio_sum;
  }
  const ProblemInstance inst = base.with_budgets(budgets)
                                   .with_alpha(cfg.alpha)
                                   .with_risk_tolerance(job.theta);
  const std::uint64_t job_seed = mix_seed(cfg.seed, job.index);

  // The merged-adgroup baseline rewrites the instance, so metrics and the
  // audit run against whichever instance the assignment refers to.
  auto finish = [&](const ProblemInstance& ref, const Assignment& asg) {
    AssignmentMetrics met = evaluate(ref, asg);
    row.profit = met.expected_profit;
    row.roi = met.roi;
    row.cost = met.expected_cost;
    row.variance = met.profit_variance;
    row.n_assigned = met.n_assigned;
    audit_row(ref, asg, cfg.audit_samples, job_seed, row);
  };

  if (job.approach == Approach::Solver) {
    SolverConfig sc;
    sc.seed = job_seed;
    sc.node_limit = cfg.node_limit;
    sc.time_limit_s = cfg.time_limit_s;
    sc.workers = 1;  // the sweep parallelizes across jobs instead
    sc.run_chance_audit = false;  // audited below, uniformly with the baselines
    SolveReport rep = solve(inst, sc);
    row.proven_optimal = rep.proven_optimal;
    row.gap = rep.gap;
    row.nodes = rep.nodes_expanded;
    finish(inst, rep.best);
  } else {
    BaselineRun run = run_baseline(baseline_of(job.approach), inst, job_seed);
    row.proven_optimal = false;
    row.gap = std::numeric_limits<double>::quiet_NaN();
    finish(run.instance, run.assignment);
  }
  return row;
}

}  // namespace

std::vector<SweepRow> run_sweep(const ProblemInstance& base, const SweepConfig& cfg) {
  if (cfg.levels.empty()) throw std::invalid_argument("sweep: no budget levels");
  if (cfg.thetas.empty()) throw std::invalid_argument("sweep: no risk tolerances");
  if (cfg.approaches.empty()) throw std::invalid_argument("sweep: no approaches");
  if (cfg.ratio.size() != base.adgroups().size()) {
    throw std::invalid_argument("sweep: ratio size must match adgroup count");
  }
  for (double r : cfg.ratio) {
    if (!(r > 0.0) || !std::isfinite(r)) {
      throw std::invalid_argument("sweep: ratio weights must be positive finite");
    }
  }
  if (cfg.workers < 1) throw std::invalid_argument("sweep: workers must be >= 1");

  std::vector<Job> jobs;
  for (double theta : cfg.thetas) {
    for (double level : cfg.levels) {
      for (Approach a : cfg.approaches) {
        jobs.push_back({level, theta, a, jobs.size()});
      }
    }
  }

  std::vector<SweepRow> rows(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    while (true) {
      const std::size_t k = next.fetch_add(1);
      if (k >= jobs.size()) return;
      try {
        rows[k] = run_job(base, cfg, jobs[k]);
      } catch (const std::exception& ex) {
        SweepRow& row = rows[k];
        row.level = jobs[k].level;
        row.theta = jobs[k].theta;
        row.approach = jobs[k].approach;
        row.status = ex.what();
        row.proven_optimal = false;
        row.profit = row.cost = row.variance = 0.0;
        row.chance_min = row.audit_min = 0.0;
      }
    }
  };

  const std::size_t nthreads =
      std::min(static_cast<std::size_t>(cfg.workers), jobs.size());
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (std::size_t t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return rows;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "level,theta,approach,status,profit,roi,cost,variance,n_assigned,"
        "chance_min,audit_min,proven_optimal,gap,nodes\n";
  for (const SweepRow& r : rows) {
    std::string status = r.status;  // error text may carry CSV metacharacters
    for (char& c : status) {
      if (c == ',' || c == '"' || c == '\n' || c == '\r') c = ';';
    }
    os << format_double(r.level) << ',' << format_double(r.theta) << ','
       << approach_name(r.approach) << ',' << status << ','
       << format_double(r.profit) << ',';
    if (r.roi) os << format_double(*r.roi);
    os << ',' << format_double(r.cost) << ',' << format_double(r.variance) << ','
       << r.n_assigned << ',' << format_double(r.chance_min) << ','
       << format_double(r.audit_min) << ',' << (r.proven_optimal ? 1 : 0) << ','
       << format_double(r.gap) << ',' << r.nodes << '\n';
  }
}

}  // namespace kwgroup

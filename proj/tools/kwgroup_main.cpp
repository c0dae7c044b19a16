// Command-line front end: generate or estimate instances, run the exact
// solver or a baseline, audit an assignment, and drive experiment sweeps.
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "kwgroup/baselines.hpp"
#include "kwgroup/bnb.hpp"
#include "kwgroup/chance.hpp"
#include "kwgroup/csv.hpp"
#include "kwgroup/data.hpp"
#include "kwgroup/model.hpp"
#include "kwgroup/normal.hpp"
#include "kwgroup/sweep.hpp"

namespace {

using nlohmann::json;
using namespace kwgroup;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
// Solver stopped at a limit with nothing assigned and the question still open.
constexpr int kExitInconclusive = 2;

void print_warnings(const Diagnostics& diag) {
  for (const std::string& w : diag.warnings) std::cerr << "warning: " << w << "\n";
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  return os;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open: " + path);
  return is;
}

ProblemInstance load_instance(const std::string& instance_path,
                              const std::string& adgroups_path, double theta,
                              double alpha_override) {
  auto ist = open_in(instance_path);
  Diagnostics diag;
  InstanceData data = read_instance_csv(ist, &diag);
  print_warnings(diag);
  auto gst = open_in(adgroups_path);
  std::vector<AdGroupSpec> groups = read_adgroups_csv(gst);
  if (static_cast<int>(groups.size()) != data.m) {
    throw std::runtime_error("instance has " + std::to_string(data.m) +
                             " adgroup columns but the adgroup table has " +
                             std::to_string(groups.size()) + " rows");
  }
  ProblemInstance inst(std::move(data.keywords), std::move(groups), theta);
  if (alpha_override > 0.0) return inst.with_alpha(alpha_override);
  return inst;
}

BaselineKind baseline_from_name(const std::string& name) {
  for (BaselineKind k : {BaselineKind::SingleGroup, BaselineKind::ProductLabels,
                         BaselineKind::Clustered, BaselineKind::HierarchyLabels,
                         BaselineKind::Greedy}) {
    if (name == baseline_name(k)) return k;
  }
  throw std::runtime_error("unknown baseline kind: " + name);
}

// Shared tail of solve/baseline/audit: metrics plus per-adgroup compliance.
void report_assignment(const ProblemInstance& inst, const Assignment& asg,
                       std::int64_t samples, std::uint64_t seed, json* manifest) {
  AssignmentMetrics met = evaluate(inst, asg);
  std::cout << "profit " << format_double(met.expected_profit) << "\n";
  std::cout << "variance " << format_double(met.profit_variance) << "\n";
  std::cout << "cost " << format_double(met.expected_cost) << "\n";
  if (met.roi) std::cout << "roi " << format_double(*met.roi) << "\n";
  std::cout << "assigned " << met.n_assigned << " of " << inst.n() << "\n";
  std::cout << "risk_feasible " << (risk_feasible(inst, asg) ? 1 : 0) << "\n";

  json adgroups = json::array();
  for (int j = 0; j < inst.m(); ++j) {
    ChanceCheckConfig cc;
    cc.samples = samples;
    cc.seed = mix_seed(seed, 0x5eedULL + static_cast<std::uint64_t>(j));
    ChanceCheckResult sim = simulate_chance(inst, asg.column(j), j, cc);
    std::cout << "adgroup " << inst.adgroup(j).id << " chance "
              << format_double(met.adgroup_chance[j]) << " audit "
              << format_double(sim.alpha_hat) << " required "
              << format_double(inst.adgroup(j).alpha) << "\n";
    adgroups.push_back({{"id", inst.adgroup(j).id},
                        {"chance", met.adgroup_chance[j]},
                        {"audit", sim.alpha_hat},
                        {"audit_se", sim.standard_error},
                        {"required", inst.adgroup(j).alpha}});
  }
  if (manifest) {
    (*manifest)["profit"] = met.expected_profit;
    (*manifest)["variance"] = met.profit_variance;
    (*manifest)["cost"] = met.expected_cost;
    if (met.roi) (*manifest)["roi"] = *met.roi;
    (*manifest)["n_assigned"] = met.n_assigned;
    (*manifest)["risk_feasible"] = risk_feasible(inst, asg);
    (*manifest)["adgroups"] = std::move(adgroups);
  }
}

void write_manifest(const std::string& path, const json& manifest) {
  if (path.empty()) return;
  auto os = open_out(path);
  os << manifest.dump(2) << "\n";
}

int cmd_gen(const std::string& preset, int n, int m, std::uint64_t seed,
            const std::vector<double>& budgets, double alpha, int product_labels,
            int hierarchy_labels, const std::string& instance_path,
            const std::string& adgroups_path) {
  GeneratorSpec spec;
  if (preset == "small") {
    spec = GeneratorSpec::preset_small();
  } else if (preset == "large") {
    spec = GeneratorSpec::preset_large();
  } else {
    throw std::runtime_error("unknown preset: " + preset);
  }
  if (n > 0) spec.n = n;
  if (m > 0) spec.m = m;
  spec.seed = seed;
  if (!budgets.empty()) spec.budgets = budgets;
  if (alpha > 0.0) spec.alpha = alpha;
  if (product_labels > 0) spec.product_label_count = product_labels;
  if (hierarchy_labels > 0) spec.hierarchy_label_count = hierarchy_labels;

  Diagnostics diag;
  ProblemInstance inst = generate(spec, &diag);
  print_warnings(diag);
  {
    auto os = open_out(instance_path);
    write_instance_csv(os, inst.keywords(), inst.m());
  }
  {
    auto os = open_out(adgroups_path);
    write_adgroups_csv(os, inst.adgroups());
  }
  std::cout << "keywords " << inst.n() << "\nadgroups " << inst.m() << "\n";
  return kExitOk;
}

int cmd_estimate(const std::string& report_path, int m, const std::string& out_path) {
  auto is = open_in(report_path);
  std::vector<ReportRow> rows = read_report_csv(is);
  Diagnostics diag;
  std::vector<KeywordStat> stats = estimate_stats(rows, m, &diag);
  print_warnings(diag);
  auto os = open_out(out_path);
  write_instance_csv(os, stats, m);
  std::cout << "keywords " << stats.size() << "\nadgroups " << m << "\n";
  return kExitOk;
}

int cmd_solve(const std::string& instance_path, const std::string& adgroups_path,
              double theta, double alpha, std::uint64_t seed, int workers,
              std::int64_t node_limit, double time_limit_s, std::int64_t samples,
              const std::string& assignment_path, const std::string& json_path) {
  ProblemInstance inst = load_instance(instance_path, adgroups_path, theta, alpha);
  SolverConfig sc;
  sc.seed = seed;
  sc.workers = workers;
  sc.node_limit = node_limit;
  sc.time_limit_s = time_limit_s;
  sc.run_chance_audit = false;  // the audit below covers it
  SolveReport rep = solve(inst, sc);

  std::cout << "proven_optimal " << (rep.proven_optimal ? 1 : 0) << "\n";
  std::cout << "gap " << format_double(rep.gap) << "\n";
  std::cout << "nodes " << rep.nodes_expanded << "\n";
  json manifest;
  manifest["command"] = "solve";
  manifest["seed"] = seed;
  manifest["theta"] = inst.risk_tolerance();
  manifest["proven_optimal"] = rep.proven_optimal;
  manifest["gap"] = rep.gap;
  manifest["nodes"] = rep.nodes_expanded;
  report_assignment(inst, rep.best, samples, seed, &manifest);
  if (!assignment_path.empty()) {
    auto os = open_out(assignment_path);
    write_assignment_csv(os, inst, rep.best);
  }
  write_manifest(json_path, manifest);
  if (!rep.proven_optimal && rep.best.n_assigned() == 0 && rep.gap > 0.0) {
    return kExitInconclusive;
  }
  return kExitOk;
}

int cmd_baseline(const std::string& kind_name, const std::string& instance_path,
                 const std::string& adgroups_path, double theta, double alpha,
                 std::uint64_t seed, std::int64_t samples,
                 const std::string& assignment_path, const std::string& json_path) {
  ProblemInstance inst = load_instance(instance_path, adgroups_path, theta, alpha);
  BaselineRun run = run_baseline(baseline_from_name(kind_name), inst, seed);
  std::cout << "baseline " << kind_name << "\n";
  json manifest;
  manifest["command"] = "baseline";
  manifest["kind"] = kind_name;
  manifest["seed"] = seed;
  manifest["theta"] = inst.risk_tolerance();
  report_assignment(run.instance, run.assignment, samples, seed, &manifest);
  if (!assignment_path.empty()) {
    auto os = open_out(assignment_path);
    write_assignment_csv(os, run.instance, run.assignment);
  }
  write_manifest(json_path, manifest);
  return kExitOk;
}

int cmd_audit(const std::string& instance_path, const std::string& adgroups_path,
              const std::string& assignment_path, double theta, double alpha,
              std::uint64_t seed, std::int64_t samples, const std::string& json_path) {
  ProblemInstance inst = load_instance(instance_path, adgroups_path, theta, alpha);
  auto is = open_in(assignment_path);
  Assignment asg = read_assignment_csv(is, inst);
  json manifest;
  manifest["command"] = "audit";
  manifest["seed"] = seed;
  manifest["theta"] = inst.risk_tolerance();
  report_assignment(inst, asg, samples, seed, &manifest);
  write_manifest(json_path, manifest);
  return kExitOk;
}

int cmd_sweep(const std::string& instance_path, const std::string& adgroups_path,
              const std::vector<double>& levels, const std::vector<double>& thetas,
              const std::vector<double>& ratio, double alpha,
              const std::vector<std::string>& approach_names, std::uint64_t seed,
              int workers, std::int64_t node_limit, double time_limit_s,
              std::int64_t samples, const std::string& out_path) {
  ProblemInstance base = load_instance(instance_path, adgroups_path,
                                       std::numeric_limits<double>::infinity(), 0.0);
  SweepConfig cfg;
  cfg.levels = levels;
  cfg.thetas = thetas;
  if (!ratio.empty()) {
    cfg.ratio = ratio;
  } else {
    cfg.ratio.reserve(base.adgroups().size());
    for (const AdGroupSpec& g : base.adgroups()) cfg.ratio.push_back(g.budget);
  }
  cfg.alpha = alpha;
  if (!approach_names.empty()) {
    cfg.approaches.clear();
    for (const std::string& name : approach_names) {
      cfg.approaches.push_back(approach_from_name(name));
    }
  }
  cfg.seed = seed;
  cfg.workers = workers;
  cfg.node_limit = node_limit;
  cfg.time_limit_s = time_limit_s;
  cfg.audit_samples = samples;

  std::vector<SweepRow> rows = run_sweep(base, cfg);
  auto os = open_out(out_path);
  write_sweep_csv(os, rows);
  int failed = 0;
  for (const SweepRow& r : rows) {
    if (r.status != "ok") {
      ++failed;
      std::cerr << "warning: job failed (level " << format_double(r.level)
                << ", theta " << format_double(r.theta) << ", "
                << approach_name(r.approach) << "): " << r.status << "\n";
    }
  }
  std::cout << "rows " << rows.size() << "\nfailed " << failed << "\n";
  return failed == 0 ? kExitOk : kExitError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Keyword-to-adgroup assignment under budget chance constraints"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a synthetic instance");
  std::string gen_preset = "small";
  int gen_n = 0, gen_m = 0, gen_product = 0, gen_hierarchy = 0;
  std::uint64_t gen_seed = 1;
  std::vector<double> gen_budgets;
  double gen_alpha = 0.0;
  std::string gen_instance = "instance.csv", gen_adgroups = "adgroups.csv";
  gen->add_option("--preset", gen_preset, "small or large")
      ->check(CLI::IsMember({"small", "large"}));
  gen->add_option("--n", gen_n, "keyword count (0 = preset value)");
  gen->add_option("--m", gen_m, "adgroup count (0 = preset value)");
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--budgets", gen_budgets, "per-adgroup budgets")->delimiter(',');
  gen->add_option("--alpha", gen_alpha, "confidence level for every adgroup");
  gen->add_option("--product-labels", gen_product, "distinct product labels");
  gen->add_option("--hierarchy-labels", gen_hierarchy, "distinct hierarchy labels");
  gen->add_option("--instance", gen_instance, "output keyword table");
  gen->add_option("--adgroups", gen_adgroups, "output adgroup table");

  // estimate
  auto* est = app.add_subcommand("estimate", "Estimate keyword statistics from a performance report");
  std::string est_report, est_out = "instance.csv";
  int est_m = 0;
  est->add_option("--report", est_report, "period-level performance report")->required();
  est->add_option("--m", est_m, "number of adgroups to size columns for")->required();
  est->add_option("--out", est_out, "output keyword table");

  // shared solve/baseline/audit inputs
  std::string instance_path, adgroups_path;
  double theta = std::numeric_limits<double>::infinity();
  double alpha_override = 0.0;
  std::uint64_t seed = 0;
  std::int64_t samples = 10000;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--instance", instance_path, "keyword table")->required();
    cmd->add_option("--adgroups", adgroups_path, "adgroup table")->required();
    cmd->add_option("--theta", theta, "risk tolerance (inf = no bound)");
    cmd->add_option("--alpha", alpha_override, "override every adgroup's confidence level");
    cmd->add_option("--seed", seed, "audit seed");
    cmd->add_option("--samples", samples, "audit sample count");
  };

  // solve
  auto* slv = app.add_subcommand("solve", "Exact branch-and-bound assignment");
  int workers = 1;
  std::int64_t node_limit = -1;
  double time_limit_s = -1.0;
  std::string assignment_out, json_out;
  add_common(slv);
  slv->add_option("--workers", workers, "parallel node evaluations");
  slv->add_option("--node-limit", node_limit, "stop after this many nodes (-1 = none)");
  slv->add_option("--time-limit-s", time_limit_s, "wall-clock cap in seconds (-1 = none)");
  slv->add_option("--assignment", assignment_out, "write the chosen assignment here");
  slv->add_option("--json", json_out, "write a run manifest here");

  // baseline
  auto* bas = app.add_subcommand("baseline", "Run one reference grouping strategy");
  std::string baseline_kind;
  bas->add_option("--kind", baseline_kind, "single_group, product_labels, clustered, hierarchy_labels or greedy")
      ->required();
  add_common(bas);
  bas->add_option("--assignment", assignment_out, "write the chosen assignment here");
  bas->add_option("--json", json_out, "write a run manifest here");

  // audit
  auto* aud = app.add_subcommand("audit", "Evaluate and audit an existing assignment");
  std::string audit_assignment;
  add_common(aud);
  aud->add_option("--assignment", audit_assignment, "assignment to audit")->required();
  aud->add_option("--json", json_out, "write a run manifest here");

  // sweep
  auto* swp = app.add_subcommand("sweep", "Cross budget levels, risk tolerances and approaches");
  std::vector<double> levels, thetas{std::numeric_limits<double>::infinity()}, ratio;
  std::vector<std::string> approach_names;
  double sweep_alpha = 0.95;
  std::string sweep_out = "sweep.csv";
  swp->add_option("--instance", instance_path, "keyword table")->required();
  swp->add_option("--adgroups", adgroups_path, "adgroup table")->required();
  swp->add_option("--levels", levels, "total budgets to sweep")->required()->delimiter(',');
  swp->add_option("--thetas", thetas, "risk tolerances (inf allowed)")->delimiter(',');
  swp->add_option("--ratio", ratio, "budget split weights (default: adgroup-table budgets)")
      ->delimiter(',');
  swp->add_option("--alpha", sweep_alpha, "confidence level for every adgroup");
  swp->add_option("--approaches", approach_names,
                  "subset of solver, single_group, product_labels, clustered, hierarchy_labels, greedy")
      ->delimiter(',');
  swp->add_option("--seed", seed, "sweep seed");
  swp->add_option("--workers", workers, "parallel jobs");
  swp->add_option("--node-limit", node_limit, "per-job node cap (-1 = none)");
  swp->add_option("--time-limit-s", time_limit_s, "per-job wall-clock cap (-1 = none)");
  swp->add_option("--samples", samples, "audit sample count per row");
  swp->add_option("--out", sweep_out, "output table");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(gen)) {
      return cmd_gen(gen_preset, gen_n, gen_m, gen_seed, gen_budgets, gen_alpha,
                     gen_product, gen_hierarchy, gen_instance, gen_adgroups);
    }
    if (app.got_subcommand(est)) return cmd_estimate(est_report, est_m, est_out);
    if (app.got_subcommand(slv)) {
      return cmd_solve(instance_path, adgroups_path, theta, alpha_override, seed,
                       workers, node_limit, time_limit_s, samples, assignment_out,
                       json_out);
    }
    if (app.got_subcommand(bas)) {
      return cmd_baseline(baseline_kind, instance_path, adgroups_path, theta,
                          alpha_override, seed, samples, assignment_out, json_out);
    }
    if (app.got_subcommand(aud)) {
      return cmd_audit(instance_path, adgroups_path, audit_assignment, theta,
                       alpha_override, seed, samples, json_out);
    }
    if (app.got_subcommand(swp)) {
      return cmd_sweep(instance_path, adgroups_path, levels, thetas, ratio,
                       sweep_alpha, approach_names, seed, workers, node_limit,
                       time_limit_s, samples, sweep_out);
    }
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitError;
  }
  return kExitError;
}

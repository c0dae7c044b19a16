#include "kwgroup/bnb.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "kwgroup/normal.hpp"

namespace kwgroup {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr signed char kUndecided = -2;
constexpr signed char kRejected = -1;

// Static per-solve data shared by every node evaluation.
struct SearchContext {
  const ProblemInstance* inst = nullptr;
  std::vector<int> keyword_order;            // branching order
  std::vector<int> group_order;              // adgroups by decreasing budget
  std::vector<std::vector<int>> col_order;   // per adgroup, keywords by decreasing profit
  std::vector<double> kappa;                 // per adgroup
  double risk_cap = kInf;
};

SearchContext make_context(const ProblemInstance& inst) {
  SearchContext ctx;
  ctx.inst = &inst;
  const int n = inst.n(), m = inst.m();
  ctx.keyword_order.resize(n);
  for (int i = 0; i < n; ++i) ctx.keyword_order[i] = i;
  std::vector<double> best_e(n, -kInf);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) best_e[i] = std::max(best_e[i], inst.pair_profit(i, j));
  }
  std::stable_sort(ctx.keyword_order.begin(), ctx.keyword_order.end(),
                   [&](int a, int b) { return best_e[a] > best_e[b]; });
  ctx.group_order.resize(m);
  for (int j = 0; j < m; ++j) ctx.group_order[j] = j;
  std::stable_sort(ctx.group_order.begin(), ctx.group_order.end(), [&](int a, int b) {
    return inst.adgroup(a).budget > inst.adgroup(b).budget;
  });
  ctx.col_order.resize(m);
  ctx.kappa.resize(m);
  for (int j = 0; j < m; ++j) {
    ctx.kappa[j] = normal_quantile(inst.adgroup(j).alpha);
    auto& ord = ctx.col_order[j];
    ord.resize(n);
    for (int i = 0; i < n; ++i) ord[i] = i;
    std::stable_sort(ord.begin(), ord.end(), [&](int a, int b) {
      return inst.pair_profit(a, j) > inst.pair_profit(b, j);
    });
  }
  ctx.risk_cap = inst.risk_tolerance() * inst.total_budget();
  return ctx;
}

// Spend/risk totals of the cells a node has already committed to.
struct FixedTotals {
  std::vector<double> mu, var;
  double risk = 0.0;
  double profit = 0.0;
};

FixedTotals totals_of(const SearchContext& ctx, const std::vector<signed char>& row_state) {
  const auto& inst = *ctx.inst;
  FixedTotals t;
  t.mu.assign(inst.m(), 0.0);
  t.var.assign(inst.m(), 0.0);
  for (int i = 0; i < inst.n(); ++i) {
    int j = row_state[i];
    if (j < 0) continue;
    t.mu[j] += inst.cost_mean(i, j);
    double s = inst.cost_sd(i, j);
    t.var[j] += s * s;
    t.risk += inst.pair_variance(i, j);
    t.profit += inst.pair_profit(i, j);
  }
  return t;
}

bool fits_column(const SearchContext& ctx, const FixedTotals& t, int i, int j) {
  const auto& inst = *ctx.inst;
  double mu = t.mu[j] + inst.cost_mean(i, j);
  double sd = inst.cost_sd(i, j);
  double lhs = mu + ctx.kappa[j] * std::sqrt(t.var[j] + sd * sd);
  return lhs <= inst.adgroup(j).budget;
}

bool fits_risk(const SearchContext& ctx, const FixedTotals& t, int i, int j) {
  return t.risk + ctx.inst->pair_variance(i, j) <= ctx.risk_cap;
}

// Completes a partial decision vector greedily; undecided keywords are
// admitted per adgroup in decreasing-profit order under both gates.
Assignment greedy_complete(const SearchContext& ctx, const std::vector<signed char>& row_state) {
  const auto& inst = *ctx.inst;
  Assignment out(inst.n(), inst.m());
  FixedTotals t = totals_of(ctx, row_state);
  for (int i = 0; i < inst.n(); ++i) {
    if (row_state[i] >= 0) out.assign(i, row_state[i]);
  }
  std::vector<char> taken(inst.n(), 0);
  for (int j : ctx.group_order) {
    for (int i : ctx.col_order[j]) {
      if (inst.pair_profit(i, j) <= 0.0) break;
      if (row_state[i] != kUndecided || taken[i]) continue;
      if (!fits_column(ctx, t, i, j) || !fits_risk(ctx, t, i, j)) continue;
      out.assign(i, j);
      taken[i] = 1;
      t.mu[j] += inst.cost_mean(i, j);
      double s = inst.cost_sd(i, j);
      t.var[j] += s * s;
      t.risk += inst.pair_variance(i, j);
    }
  }
  return out;
}

struct Node {
  std::vector<signed char> row_state;
  double bound = kInf;
  int depth = 0;
  std::uint64_t id = 0;
};

// Max-heap order: larger bound first, then deeper, then older.
bool heap_less(const Node& a, const Node& b) {
  if (a.bound != b.bound) return a.bound < b.bound;
  if (a.depth != b.depth) return a.depth < b.depth;
  return a.id > b.id;
}

NodeFixings fixings_of(const std::vector<signed char>& row_state, int n, int m) {
  NodeFixings fx(n, m);
  for (int i = 0; i < n; ++i) {
    if (row_state[i] >= 0) {
      fx.fix_one(i, row_state[i]);
    } else if (row_state[i] == kRejected) {
      fx.fix_row_zero(i);
    }
  }
  return fx;
}

struct Candidate {
  double value = -kInf;
  Assignment asg;
};

void offer(Candidate& best, double value, Assignment asg) {
  if (value > best.value ||
      (value == best.value && best.asg.n() > 0 && asg.lex_less(best.asg))) {
    best.value = value;
    best.asg = std::move(asg);
  }
}

// Everything produced by expanding one node; merged in deterministic order.
struct ExpandResult {
  std::vector<Node> children;  // ids assigned at merge time
  Candidate candidate;
  std::vector<std::pair<NodeFixings, double>> traces;
};

ExpandResult expand(const SearchContext& ctx, const Node& node, const SolverConfig& cfg,
                    double inf_value) {
  const auto& inst = *ctx.inst;
  const int n = inst.n(), m = inst.m();
  ExpandResult out;
  const int k = ctx.keyword_order[node.depth];
  FixedTotals t = totals_of(ctx, node.row_state);

  for (int step = 0; step <= m; ++step) {
    Node child;
    child.row_state = node.row_state;
    child.depth = node.depth + 1;
    if (step < m) {
      int j = ctx.group_order[step];
      if (inst.pair_profit(k, j) <= 0.0) continue;  // rejection child dominates
      if (!fits_column(ctx, t, k, j) || !fits_risk(ctx, t, k, j)) continue;
      child.row_state[k] = static_cast<signed char>(j);
    } else {
      child.row_state[k] = kRejected;
    }

    if (child.depth == n) {
      Assignment leaf = greedy_complete(ctx, child.row_state);
      const double leaf_value = expected_profit(inst, leaf);
      offer(out.candidate, leaf_value, std::move(leaf));
      continue;
    }

    if (cfg.disable_pruning) {
      child.bound = kInf;
      out.children.push_back(std::move(child));
      continue;
    }

    NodeFixings fx = fixings_of(child.row_state, n, m);
    RelaxOptions ropt;
    ropt.tol = cfg.relax_tol;
    ropt.use_risk_cut = cfg.use_risk_cut;
    RelaxationResult rel = solve_relaxation(inst, fx, ropt);
    if (cfg.relax_trace) out.traces.emplace_back(fx, rel.upper_bound);
    if (rel.status == RelaxStatus::Infeasible) continue;
    child.bound = std::min(node.bound, rel.upper_bound);

    Assignment done = greedy_complete(ctx, child.row_state);
    const double done_value = expected_profit(inst, done);
    offer(out.candidate, done_value, std::move(done));

    if (child.bound > inf_value) out.children.push_back(std::move(child));
  }
  return out;
}

}  // namespace

Assignment greedy_assignment(const ProblemInstance& inst) {
  SearchContext ctx = make_context(inst);
  std::vector<signed char> blank(inst.n(), kUndecided);
  return greedy_complete(ctx, blank);
}

SolveReport solve(const ProblemInstance& inst, const SolverConfig& cfg) {
  if (cfg.workers < 1) throw std::invalid_argument("solve: workers must be positive");
  const auto start = std::chrono::steady_clock::now();
  SearchContext ctx = make_context(inst);
  const int n = inst.n(), m = inst.m();

  SolveReport rep;
  Candidate incumbent;
  {
    Assignment g = greedy_assignment(inst);
    incumbent.value = expected_profit(inst, g);
    incumbent.asg = std::move(g);
  }

  std::vector<Node> heap;
  std::uint64_t next_id = 0;
  if (n > 0) {
    Node root;
    root.row_state.assign(n, kUndecided);
    root.bound = kInf;
    root.id = next_id++;
    heap.push_back(std::move(root));
  }

  bool hit_limit = false;
  while (!heap.empty()) {
    if (cfg.node_limit >= 0 && rep.nodes_expanded >= cfg.node_limit) {
      hit_limit = true;
      break;
    }
    if (cfg.time_limit_s >= 0.0) {
      std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
      if (elapsed.count() >= cfg.time_limit_s) {
        hit_limit = true;
        break;
      }
    }

    // One synchronous round: pop up to `workers` live nodes, evaluate them
    // (in parallel when asked), then merge results in pop order.
    std::vector<Node> batch;
    while (!heap.empty() && batch.size() < static_cast<std::size_t>(cfg.workers)) {
      std::pop_heap(heap.begin(), heap.end(), heap_less);
      Node top = std::move(heap.back());
      heap.pop_back();
      if (!cfg.disable_pruning && top.bound <= incumbent.value) continue;
      batch.push_back(std::move(top));
      if (cfg.node_limit >= 0 &&
          rep.nodes_expanded + static_cast<std::int64_t>(batch.size()) >= cfg.node_limit) {
        break;
      }
    }
    if (batch.empty()) continue;

    std::vector<ExpandResult> results(batch.size());
    const double inf_snapshot = incumbent.value;
    if (cfg.workers > 1 && batch.size() > 1) {
      std::vector<std::thread> pool;
      for (std::size_t w = 0; w < batch.size(); ++w) {
        pool.emplace_back([&, w] { results[w] = expand(ctx, batch[w], cfg, inf_snapshot); });
      }
      for (auto& th : pool) th.join();
    } else {
      for (std::size_t w = 0; w < batch.size(); ++w) {
        results[w] = expand(ctx, batch[w], cfg, inf_snapshot);
      }
    }

    rep.nodes_expanded += static_cast<std::int64_t>(batch.size());
    for (auto& r : results) {
      for (auto& tr : r.traces) {
        cfg.relax_trace(tr.first, tr.second);
      }
      if (r.candidate.asg.n() > 0) {
        offer(incumbent, r.candidate.value, std::move(r.candidate.asg));
      }
      for (auto& child : r.children) {
        if (!cfg.disable_pruning && child.bound <= incumbent.value) continue;
        child.id = next_id++;
        heap.push_back(std::move(child));
        std::push_heap(heap.begin(), heap.end(), heap_less);
      }
    }
  }

  rep.best = std::move(incumbent.asg);
  rep.best_value = incumbent.value;
  rep.proven_optimal = !hit_limit;
  if (hit_limit) {
    double open = -kInf;
    for (const auto& node : heap) open = std::max(open, node.bound);
    rep.gap = std::max(0.0, open - rep.best_value);
    if (heap.empty()) rep.gap = 0.0;
  }

  // The search must never surface an assignment violating its own gates.
  for (int j = 0; j < m; ++j) {
    double chance = analytic_chance(inst, rep.best.column(j), j);
    if (chance < inst.adgroup(j).alpha - 1e-9) {
      throw std::logic_error("solve: returned assignment misses a budget certificate");
    }
  }
  if (profit_variance(inst, rep.best) > ctx.risk_cap * (1.0 + 1e-12)) {
    throw std::logic_error("solve: returned assignment breaks the risk cap");
  }

  rep.metrics = evaluate(inst, rep.best);
  if (cfg.run_chance_audit) {
    rep.chance_audit.resize(m);
    for (int j = 0; j < m; ++j) {
      ChanceCheckConfig ccfg;
      ccfg.samples = cfg.audit_samples;
      ccfg.seed = mix_seed(cfg.seed, 0xa0d170ULL + static_cast<std::uint64_t>(j));
      rep.chance_audit[j] = simulate_chance(inst, rep.best.column(j), j, ccfg);
    }
  }
  return rep;
}

}  // namespace kwgroup

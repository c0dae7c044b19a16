#include "kwgroup/relaxation.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "kwgroup/normal.hpp"

namespace kwgroup {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

NodeFixings::NodeFixings(int n, int m) : n_(n), m_(m) {
  if (n < 0 || m < 1) throw std::invalid_argument("NodeFixings: bad shape");
  state_.assign(static_cast<std::size_t>(n) * m, 0);
}

int NodeFixings::idx(int i, int j) const {
  if (i < 0 || i >= n_ || j < 0 || j >= m_) {
    throw std::out_of_range("NodeFixings: index out of range");
  }
  return i * m_ + j;
}

void NodeFixings::fix_one(int i, int j) {
  int k = idx(i, j);
  if (state_[k] == 2) throw std::invalid_argument("NodeFixings: cell already forced to zero");
  for (int jj = 0; jj < m_; ++jj) {
    if (jj != j && state_[i * m_ + jj] == 1) {
      throw std::invalid_argument("NodeFixings: keyword already forced elsewhere");
    }
  }
  state_[k] = 1;
}

void NodeFixings::fix_zero(int i, int j) {
  int k = idx(i, j);
  if (state_[k] == 1) throw std::invalid_argument("NodeFixings: cell already forced to one");
  state_[k] = 2;
}

void NodeFixings::fix_row_zero(int i) {
  for (int j = 0; j < m_; ++j) fix_zero(i, j);
}

std::optional<int> NodeFixings::row_assigned(int i) const {
  for (int j = 0; j < m_; ++j) {
    if (state_[idx(i, j)] == 1) return j;
  }
  return std::nullopt;
}

namespace {

// One barrier variable: a keyword-adgroup cell still undecided after presolve.
struct FreeVar {
  int i = 0, j = 0;
  double e = 0.0;       // expected profit (raw units)
  double mu = 0.0;      // spend mean
  double sig2 = 0.0;    // spend variance
  double w = 0.0;       // profit variance
};

struct Column {
  double budget = 0.0;
  double kappa = 0.0;   // normal quantile of the adgroup's alpha
  double mu0 = 0.0;     // spend mean fixed by forced-one cells
  double var0 = 0.0;    // spend variance fixed by forced-one cells
  std::vector<int> vars;
  bool kept = false;    // participates in the barrier
  bool linear = false;  // no variance terms anywhere in the column
};

struct RowGroup {
  std::vector<int> vars;
  bool kept = false;  // barrier needed only when two or more cells compete
};

// Problem after fixings are applied and presolve has eliminated variables.
struct Reduced {
  std::vector<FreeVar> vars;
  std::vector<Column> cols;
  std::vector<RowGroup> rows;
  double fixed_profit = 0.0;
  double fixed_risk = 0.0;
  double risk_cap = kInf;
  bool risk_active = false;   // variance bound involves free variables
  bool cut_active = false;    // linear strengthening in use
  double objscale = 1.0;
};

constexpr double kFeasSlop = 1e-12;

bool build_reduced(const ProblemInstance& inst, const NodeFixings& fx,
                   const RelaxOptions& opts, Reduced& red) {
  const int n = inst.n(), m = inst.m();
  red.cols.assign(m, Column{});
  red.rows.assign(n, RowGroup{});
  for (int j = 0; j < m; ++j) {
    red.cols[j].budget = inst.adgroup(j).budget;
    red.cols[j].kappa = normal_quantile(inst.adgroup(j).alpha);
  }
  red.risk_cap = inst.risk_tolerance() * inst.total_budget();

  for (int i = 0; i < n; ++i) {
    auto forced = fx.row_assigned(i);
    if (forced) {
      int j = *forced;
      red.fixed_profit += inst.pair_profit(i, j);
      red.fixed_risk += inst.pair_variance(i, j);
      red.cols[j].mu0 += inst.cost_mean(i, j);
      double s = inst.cost_sd(i, j);
      red.cols[j].var0 += s * s;
      continue;
    }
    for (int j = 0; j < m; ++j) {
      if (fx.is_fixed_zero(i, j)) continue;
      FreeVar v;
      v.i = i;
      v.j = j;
      v.e = inst.pair_profit(i, j);
      v.mu = inst.cost_mean(i, j);
      double s = inst.cost_sd(i, j);
      v.sig2 = s * s;
      v.w = inst.pair_variance(i, j);
      if (v.e <= 0.0) continue;  // some optimum leaves nonpositive profit at zero
      red.vars.push_back(v);
    }
  }

  // Presolve: drop variables that no admissible point can set to one, until
  // stable. Fixed parts must be feasible on their own.
  std::vector<char> alive(red.vars.size(), 1);
  bool changed = true;
  while (changed) {
    changed = false;
    for (int j = 0; j < m; ++j) {
      const auto& c = red.cols[j];
      double lhs = c.mu0 + c.kappa * std::sqrt(c.var0);
      if (lhs > c.budget * (1.0 + kFeasSlop) + kFeasSlop) return false;
    }
    if (red.fixed_risk > red.risk_cap * (1.0 + kFeasSlop) + kFeasSlop) return false;
    for (std::size_t v = 0; v < red.vars.size(); ++v) {
      if (!alive[v]) continue;
      const auto& fv = red.vars[v];
      const auto& c = red.cols[fv.j];
      double lhs = c.mu0 + fv.mu + c.kappa * std::sqrt(c.var0 + fv.sig2);
      bool drop = lhs > c.budget * (1.0 + kFeasSlop) + kFeasSlop;
      if (!drop && std::isfinite(red.risk_cap)) {
        drop = red.fixed_risk + fv.w > red.risk_cap * (1.0 + kFeasSlop) + kFeasSlop;
      }
      if (drop) {
        alive[v] = 0;
        changed = true;
      }
    }
  }

  std::vector<FreeVar> kept;
  kept.reserve(red.vars.size());
  for (std::size_t v = 0; v < red.vars.size(); ++v) {
    if (alive[v]) kept.push_back(red.vars[v]);
  }
  red.vars = std::move(kept);

  double emax = 0.0;
  for (std::size_t v = 0; v < red.vars.size(); ++v) {
    const auto& fv = red.vars[v];
    red.cols[fv.j].vars.push_back(static_cast<int>(v));
    red.rows[fv.i].vars.push_back(static_cast<int>(v));
    emax = std::max(emax, std::fabs(fv.e));
    if (std::isfinite(red.risk_cap) && fv.w > 0.0) red.risk_active = true;
  }
  red.objscale = std::max(1.0, emax);
  red.cut_active = red.risk_active && opts.use_risk_cut;
  for (auto& c : red.cols) {
    bool any_var = false;
    for (int v : c.vars) {
      if (red.vars[v].sig2 > 0.0) any_var = true;
    }
    c.linear = !any_var && c.var0 == 0.0;
    c.kept = !c.vars.empty();
  }
  for (auto& r : red.rows) r.kept = r.vars.size() >= 2;
  return true;
}

// Barrier state at a point: slacks of every kept constraint.
struct Slacks {
  bool ok = false;
  std::vector<double> col;   // per kept column, budget minus certificate lhs
  std::vector<double> colq;  // per column, current sqrt of the variance term
  std::vector<double> row;   // per kept row
  double risk = 0.0;
  double cut = 0.0;
};

Slacks eval_slacks(const Reduced& red, const std::vector<double>& x) {
  Slacks s;
  const int m = static_cast<int>(red.cols.size());
  s.col.assign(m, 0.0);
  s.colq.assign(m, 0.0);
  s.row.assign(red.rows.size(), 0.0);
  for (double xv : x) {
    if (!(xv > 0.0 && xv < 1.0)) return s;
  }
  for (int j = 0; j < m; ++j) {
    const auto& c = red.cols[j];
    if (!c.kept) continue;
    double mu = c.mu0, var = c.var0;
    for (int v : c.vars) {
      mu += red.vars[v].mu * x[v];
      var += red.vars[v].sig2 * x[v] * x[v];
    }
    double q = std::sqrt(var);
    s.colq[j] = q;
    s.col[j] = c.budget - (mu + c.kappa * q);
    if (s.col[j] <= 0.0) return s;
  }
  for (std::size_t r = 0; r < red.rows.size(); ++r) {
    if (!red.rows[r].kept) continue;
    double sum = 0.0;
    for (int v : red.rows[r].vars) sum += x[v];
    s.row[r] = 1.0 - sum;
    if (s.row[r] <= 0.0) return s;
  }
  if (red.risk_active) {
    double h = red.fixed_risk;
    for (std::size_t v = 0; v < x.size(); ++v) h += red.vars[v].w * x[v] * x[v];
    s.risk = red.risk_cap - h;
    if (s.risk <= 0.0) return s;
  }
  if (red.cut_active) {
    double h = red.fixed_risk;
    for (std::size_t v = 0; v < x.size(); ++v) h += red.vars[v].w * x[v];
    s.cut = red.risk_cap - h;
    if (s.cut <= 0.0) return s;
  }
  s.ok = true;
  return s;
}

double eval_psi(const Reduced& red, const std::vector<double>& x, double t,
                const Slacks& s) {
  double psi = 0.0;
  for (std::size_t v = 0; v < x.size(); ++v) {
    psi += -t * (red.vars[v].e / red.objscale) * x[v];
    psi += -std::log(x[v]) - std::log(1.0 - x[v]);
  }
  for (std::size_t j = 0; j < red.cols.size(); ++j) {
    if (red.cols[j].kept) psi += -std::log(s.col[j]);
  }
  for (std::size_t r = 0; r < red.rows.size(); ++r) {
    if (red.rows[r].kept) psi += -std::log(s.row[r]);
  }
  if (red.risk_active) psi += -std::log(s.risk);
  if (red.cut_active) psi += -std::log(s.cut);
  return psi;
}

// Gradient plus the Hessian pieces: positive diagonal, per-row rank one
// terms handled inside the row blocks, and a short list of global rank one
// vectors with signs.
struct NewtonSystem {
  std::vector<double> grad;
  std::vector<double> diag;
  std::vector<Eigen::VectorXd> rank1;
  std::vector<double> sign;
};

void assemble(const Reduced& red, const std::vector<double>& x, double t,
              const Slacks& s, NewtonSystem& sys) {
  const std::size_t nv = x.size();
  sys.grad.assign(nv, 0.0);
  sys.diag.assign(nv, 0.0);
  sys.rank1.clear();
  sys.sign.clear();
  for (std::size_t v = 0; v < nv; ++v) {
    sys.grad[v] = -t * (red.vars[v].e / red.objscale) - 1.0 / x[v] + 1.0 / (1.0 - x[v]);
    sys.diag[v] = 1.0 / (x[v] * x[v]) + 1.0 / ((1.0 - x[v]) * (1.0 - x[v]));
  }
  for (std::size_t j = 0; j < red.cols.size(); ++j) {
    const auto& c = red.cols[j];
    if (!c.kept) continue;
    double sc = s.col[j];
    Eigen::VectorXd a = Eigen::VectorXd::Zero(nv);
    if (c.linear) {
      for (int v : c.vars) {
        a[v] = red.vars[v].mu;
        sys.grad[v] += red.vars[v].mu / sc;
      }
      a /= sc;
      sys.rank1.push_back(std::move(a));
      sys.sign.push_back(1.0);
      continue;
    }
    double q = s.colq[j];
    Eigen::VectorXd b = Eigen::VectorXd::Zero(nv);
    for (int v : c.vars) {
      double sig2 = red.vars[v].sig2;
      double gv = red.vars[v].mu + c.kappa * sig2 * x[v] / q;
      a[v] = gv;
      sys.grad[v] += gv / sc;
      sys.diag[v] += c.kappa * sig2 / (sc * q);
      b[v] = sig2 * x[v];
    }
    a /= sc;
    b *= std::sqrt(c.kappa / (sc * q * q * q));
    sys.rank1.push_back(std::move(a));
    sys.sign.push_back(1.0);
    sys.rank1.push_back(std::move(b));
    sys.sign.push_back(-1.0);
  }
  if (red.risk_active) {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(nv);
    for (std::size_t v = 0; v < nv; ++v) {
      double w = red.vars[v].w;
      if (w == 0.0) continue;
      a[v] = 2.0 * w * x[v];
      sys.grad[v] += 2.0 * w * x[v] / s.risk;
      sys.diag[v] += 2.0 * w / s.risk;
    }
    a /= s.risk;
    sys.rank1.push_back(std::move(a));
    sys.sign.push_back(1.0);
  }
  if (red.cut_active) {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(nv);
    for (std::size_t v = 0; v < nv; ++v) {
      double w = red.vars[v].w;
      if (w == 0.0) continue;
      a[v] = w;
      sys.grad[v] += w / s.cut;
    }
    a /= s.cut;
    sys.rank1.push_back(std::move(a));
    sys.sign.push_back(1.0);
  }
}

// Applies the inverse of the row-block part (diagonal plus one rank-one
// term per kept row) to a vector, via Sherman-Morrison per row.
class RowBlockInverse {
 public:
  RowBlockInverse(const Reduced& red, const std::vector<double>& diag,
                  const Slacks& s)
      : red_(red), inv_diag_(diag.size()) {
    for (std::size_t v = 0; v < diag.size(); ++v) inv_diag_[v] = 1.0 / diag[v];
    row_coef_.assign(red.rows.size(), 0.0);
    row_denom_.assign(red.rows.size(), 0.0);
    for (std::size_t r = 0; r < red.rows.size(); ++r) {
      if (!red.rows[r].kept) continue;
      double c = 1.0 / (s.row[r] * s.row[r]);
      double dsum = 0.0;
      for (int v : red.rows[r].vars) dsum += inv_diag_[v];
      row_coef_[r] = c;
      row_denom_[r] = 1.0 + c * dsum;
    }
  }

  Eigen::VectorXd apply(const Eigen::VectorXd& u) const {
    Eigen::VectorXd out(u.size());
    for (Eigen::Index v = 0; v < u.size(); ++v) out[v] = inv_diag_[v] * u[v];
    for (std::size_t r = 0; r < red_.rows.size(); ++r) {
      if (!red_.rows[r].kept) continue;
      double dot = 0.0;
      for (int v : red_.rows[r].vars) dot += out[v];
      double scale = row_coef_[r] * dot / row_denom_[r];
      for (int v : red_.rows[r].vars) out[v] -= scale * inv_diag_[v];
    }
    return out;
  }

 private:
  const Reduced& red_;
  std::vector<double> inv_diag_;
  std::vector<double> row_coef_;
  std::vector<double> row_denom_;
};

// Newton direction via the structured inverse plus a Woodbury correction
// for the global rank-one terms. Falls back to nullopt when the small
// correction system is unusable.
std::optional<Eigen::VectorXd> solve_structured(const Reduced& red,
                                                const NewtonSystem& sys,
                                                const Slacks& s) {
  const Eigen::Index nv = static_cast<Eigen::Index>(sys.grad.size());
  Eigen::VectorXd g(nv);
  for (Eigen::Index v = 0; v < nv; ++v) g[v] = -sys.grad[v];
  RowBlockInverse binv(red, sys.diag, s);
  Eigen::VectorXd base = binv.apply(g);
  const int k = static_cast<int>(sys.rank1.size());
  if (k == 0) return base;
  Eigen::MatrixXd bu(nv, k);
  for (int c = 0; c < k; ++c) bu.col(c) = binv.apply(sys.rank1[c]);
  Eigen::MatrixXd cap(k, k);
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < k; ++b) {
      cap(a, b) = sys.rank1[a].dot(bu.col(b));
    }
    cap(a, a) += sys.sign[a];  // signs are +-1, each its own inverse
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(cap);
  if (!lu.isInvertible()) return std::nullopt;
  Eigen::VectorXd small(k);
  for (int c = 0; c < k; ++c) small[c] = sys.rank1[c].dot(base);
  Eigen::VectorXd corr = lu.solve(small);
  Eigen::VectorXd out = base - bu * corr;
  if (!out.allFinite()) return std::nullopt;
  return out;
}

Eigen::VectorXd solve_dense(const Reduced& red, const NewtonSystem& sys,
                            const Slacks& s) {
  const Eigen::Index nv = static_cast<Eigen::Index>(sys.grad.size());
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(nv, nv);
  for (Eigen::Index v = 0; v < nv; ++v) h(v, v) = sys.diag[v];
  for (std::size_t r = 0; r < red.rows.size(); ++r) {
    if (!red.rows[r].kept) continue;
    double c = 1.0 / (s.row[r] * s.row[r]);
    for (int a : red.rows[r].vars) {
      for (int b : red.rows[r].vars) h(a, b) += c;
    }
  }
  for (std::size_t c = 0; c < sys.rank1.size(); ++c) {
    h += sys.sign[c] * sys.rank1[c] * sys.rank1[c].transpose();
  }
  Eigen::VectorXd g(nv);
  for (Eigen::Index v = 0; v < nv; ++v) g[v] = -sys.grad[v];
  return h.ldlt().solve(g);
}

}  // namespace

RelaxationResult solve_relaxation(const ProblemInstance& inst,
                                  const NodeFixings& fixings,
                                  const RelaxOptions& opts) {
  if (fixings.n() != inst.n() || fixings.m() != inst.m()) {
    throw std::invalid_argument("solve_relaxation: fixings shape mismatch");
  }
  const int n = inst.n(), m = inst.m();
  RelaxationResult res;
  res.x.assign(static_cast<std::size_t>(n) * m, 0.0);
  res.solved_free.assign(res.x.size(), 0);
  res.multipliers.box_lo.assign(res.x.size(), 0.0);
  res.multipliers.box_hi.assign(res.x.size(), 0.0);
  res.multipliers.row.assign(n, 0.0);
  res.multipliers.budget.assign(m, 0.0);

  Reduced red;
  if (!build_reduced(inst, fixings, opts, red)) {
    res.status = RelaxStatus::Infeasible;
    res.upper_bound = -kInf;
    return res;
  }
  for (int i = 0; i < n; ++i) {
    auto forced = fixings.row_assigned(i);
    if (forced) res.x[static_cast<std::size_t>(i) * m + *forced] = 1.0;
  }

  const double tol = opts.tol;
  const std::size_t nv = red.vars.size();
  if (nv == 0) {
    res.status = RelaxStatus::Optimal;
    res.objective = red.fixed_profit;
    res.upper_bound = red.fixed_profit + tol * std::max(1.0, std::fabs(red.fixed_profit));
    return res;
  }

  // Strictly interior start: shrink a uniform value until every slack
  // retains at least half of its empty-selection headroom.
  std::size_t max_row = 1;
  for (const auto& r : red.rows) max_row = std::max(max_row, r.vars.size());
  double delta = std::min(0.25, 0.5 / static_cast<double>(max_row));
  std::vector<double> x(nv, delta);
  for (int halvings = 0; halvings < 80; ++halvings) {
    Slacks s0 = eval_slacks(red, x);
    bool good = s0.ok;
    if (good) {
      for (std::size_t j = 0; j < red.cols.size() && good; ++j) {
        const auto& c = red.cols[j];
        if (!c.kept) continue;
        double empty = c.budget - (c.mu0 + c.kappa * std::sqrt(c.var0));
        good = s0.col[j] >= 0.5 * empty;
      }
      if (red.risk_active && good) {
        good = s0.risk >= 0.5 * (red.risk_cap - red.fixed_risk);
      }
      if (red.cut_active && good) {
        good = s0.cut >= 0.5 * (red.risk_cap - red.fixed_risk);
      }
    }
    if (good) break;
    delta *= 0.5;
    x.assign(nv, delta);
  }

  int mc = static_cast<int>(2 * nv);
  for (const auto& c : red.cols) {
    if (c.kept) ++mc;
  }
  for (const auto& r : red.rows) {
    if (r.kept) ++mc;
  }
  if (red.risk_active) ++mc;
  if (red.cut_active) ++mc;

  double t = 1.0;
  int total_newton = 0;
  double last_decrement = kInf;
  NewtonSystem sys;
  Slacks s = eval_slacks(red, x);
  if (!s.ok) {
    // The interior shrink failed; the feasible set is razor thin. Treat the
    // node as unresolved rather than wrongly pruning or cutting it.
    res.status = RelaxStatus::IterationLimit;
    res.upper_bound = kInf;
    return res;
  }

  for (int outer = 0; outer < opts.max_outer; ++outer) {
    for (int inner = 0; inner < opts.max_inner; ++inner) {
      assemble(red, x, t, s, sys);
      std::optional<Eigen::VectorXd> step;
      if (!opts.force_dense) step = solve_structured(red, sys, s);
      if (!step) step = solve_dense(red, sys, s);
      Eigen::VectorXd dx = *step;
      double descent = 0.0;
      for (std::size_t v = 0; v < nv; ++v) descent += sys.grad[v] * dx[v];
      if (!(descent < 0.0)) {
        // Direction lost descent to rounding; the iterate is already as
        // centered as double precision allows at this barrier weight.
        last_decrement = 0.0;
        break;
      }
      double lambda2 = -descent;
      last_decrement = lambda2;
      ++total_newton;
      if (lambda2 * 0.5 <= 1e-12) break;

      double amax = 1.0;
      for (std::size_t v = 0; v < nv; ++v) {
        if (dx[v] < 0.0) amax = std::min(amax, 0.99 * x[v] / -dx[v]);
        if (dx[v] > 0.0) amax = std::min(amax, 0.99 * (1.0 - x[v]) / dx[v]);
      }
      for (std::size_t r = 0; r < red.rows.size(); ++r) {
        if (!red.rows[r].kept) continue;
        double dsum = 0.0;
        for (int v : red.rows[r].vars) dsum += dx[v];
        if (dsum > 0.0) amax = std::min(amax, 0.99 * s.row[r] / dsum);
      }
      double psi0 = eval_psi(red, x, t, s);
      double alpha = amax;
      std::vector<double> xn(nv);
      bool moved = false;
      for (int bt = 0; bt < 60; ++bt) {
        for (std::size_t v = 0; v < nv; ++v) xn[v] = x[v] + alpha * dx[v];
        Slacks sn = eval_slacks(red, xn);
        if (sn.ok && eval_psi(red, xn, t, sn) <= psi0 + 0.25 * alpha * descent) {
          x = xn;
          s = sn;
          moved = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!moved) break;
    }
    if (static_cast<double>(mc) / t <= 0.5 * tol) break;
    t *= 10.0;
  }

  double obj = red.fixed_profit;
  for (std::size_t v = 0; v < nv; ++v) obj += red.vars[v].e * x[v];
  double gap_scaled = static_cast<double>(mc) / t;
  if (gap_scaled > tol || !(last_decrement <= 0.0625)) {
    res.status = RelaxStatus::IterationLimit;
    res.upper_bound = kInf;
    res.objective = obj;
    return res;
  }

  // Certified bound via weak duality: with barrier multipliers lambda_k =
  // objscale / (t * slack_k) the Lagrangian, linearized at x (valid since
  // every constraint is convex), over-estimates any admissible point. The
  // remaining stationarity residual is capped over the unit box.
  assemble(red, x, t, s, sys);
  double resid_sum = 0.0, resid_max = 0.0;
  for (std::size_t v = 0; v < nv; ++v) {
    double rv = std::fabs(sys.grad[v]) * red.objscale / t;
    resid_sum += rv;
    resid_max = std::max(resid_max, rv);
  }
  double dual_sum = static_cast<double>(mc) * red.objscale / t;

  res.status = RelaxStatus::Optimal;
  res.objective = obj;
  res.upper_bound =
      obj + dual_sum + resid_sum + tol * std::max(1.0, red.objscale);
  res.kkt_residual = resid_max / red.objscale;
  res.newton_iters = total_newton;

  const double mult = red.objscale / t;
  for (std::size_t v = 0; v < nv; ++v) {
    const auto& fv = red.vars[v];
    std::size_t cell = static_cast<std::size_t>(fv.i) * m + fv.j;
    res.x[cell] = x[v];
    res.solved_free[cell] = 1;
    res.multipliers.box_lo[cell] = mult / x[v];
    res.multipliers.box_hi[cell] = mult / (1.0 - x[v]);
  }
  for (std::size_t r = 0; r < red.rows.size(); ++r) {
    if (red.rows[r].kept) res.multipliers.row[r] = mult / s.row[r];
  }
  for (std::size_t j = 0; j < red.cols.size(); ++j) {
    if (red.cols[j].kept) res.multipliers.budget[j] = mult / s.col[j];
  }
  if (red.risk_active) res.multipliers.risk_sq = mult / s.risk;
  if (red.cut_active) res.multipliers.risk_lin = mult / s.cut;
  return res;
}

}  // namespace kwgroup

#include "kwgroup/data.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "kwgroup/normal.hpp"

namespace kwgroup {

namespace detail {

namespace {
constexpr double kInvSqrt2Pi = 0.3989422804014326779;
double phi(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }
}  // namespace

double clipped_mean(double a, double b) {
  if (b <= 0.0) return std::clamp(a, 0.0, 1.0);
  double lo = -a / b, hi = (1.0 - a) / b;
  double Plo = normal_cdf(lo), Phi_ = normal_cdf(hi);
  return (1.0 - Phi_) + a * (Phi_ - Plo) + b * (phi(lo) - phi(hi));
}

namespace {
double clipped_second_moment(double a, double b) {
  if (b <= 0.0) {
    double c = std::clamp(a, 0.0, 1.0);
    return c * c;
  }
  double lo = -a / b, hi = (1.0 - a) / b;
  double Plo = normal_cdf(lo), Phi_ = normal_cdf(hi);
  double interior = Phi_ - Plo;
  return (1.0 - Phi_) + (a * a + b * b) * interior +
         2.0 * a * b * (phi(lo) - phi(hi)) + b * b * (lo * phi(lo) - hi * phi(hi));
}
}  // namespace

double clipped_sd(double a, double b) {
  double m = clipped_mean(a, b);
  return std::sqrt(std::max(0.0, clipped_second_moment(a, b) - m * m));
}

double clipped_fraction(double a, double b) {
  if (b <= 0.0) return (a < 0.0 || a > 1.0) ? 1.0 : 0.0;
  return normal_cdf(-a / b) + (1.0 - normal_cdf((1.0 - a) / b));
}

namespace {

// Location parameter matching a clipped mean at fixed spread.
double solve_a(double b, double target_mean) {
  double lo = -40.0 * b - 1.0, hi = 40.0 * b + 2.0;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (clipped_mean(mid, b) < target_mean) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

ClipFit fit_clipped(double mean, double sd) {
  if (!(mean >= 0.0 && mean <= 1.0) || !(sd >= 0.0)) {
    throw std::invalid_argument("fit_clipped: mean must be in [0,1], sd nonnegative");
  }
  ClipFit fit;
  if (sd == 0.0 || mean == 0.0 || mean == 1.0) {
    fit.a = mean;
    fit.b = 0.0;
    fit.sd_clamped = sd > 0.0;
    fit.sd_reached = 0.0;
    return fit;
  }
  const double b_cap = 64.0;
  auto sd_at = [&](double b) { return clipped_sd(solve_a(b, mean), b); };
  double reach = sd_at(b_cap);
  if (sd >= reach) {
    fit.b = b_cap;
    fit.a = solve_a(b_cap, mean);
    fit.sd_clamped = sd > reach;
    fit.sd_reached = reach;
    return fit;
  }
  double lo = 0.0, hi = b_cap;
  for (int it = 0; it < 90; ++it) {
    double mid = 0.5 * (lo + hi);
    if (sd_at(mid) < sd) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  fit.b = 0.5 * (lo + hi);
  fit.a = solve_a(fit.b, mean);
  fit.sd_reached = sd_at(fit.b);
  return fit;
}

}  // namespace detail

namespace {

struct LognormalFit {
  double mu = 0.0;
  double sigma = 0.0;  // zero marks a constant
  double constant = 0.0;
};

LognormalFit fit_lognormal(const VariableTarget& t, const std::string& name) {
  if (!(t.mean >= 0.0) || !(t.sd >= 0.0) || !std::isfinite(t.mean) || !std::isfinite(t.sd)) {
    throw std::invalid_argument("generate: bad target for " + name);
  }
  LognormalFit f;
  if (t.mean == 0.0) {
    if (t.sd > 0.0) {
      throw std::invalid_argument("generate: " + name + " cannot have sd > 0 with mean 0");
    }
    return f;
  }
  if (t.sd == 0.0) {
    f.constant = t.mean;
    return f;
  }
  double ratio = t.sd / t.mean;
  f.sigma = std::sqrt(std::log1p(ratio * ratio));
  f.mu = std::log(t.mean) - 0.5 * f.sigma * f.sigma;
  return f;
}

double draw_lognormal(const LognormalFit& f, Rng& rng) {
  if (f.sigma == 0.0) return f.constant;
  return std::exp(f.mu + f.sigma * rng.standard_normal());
}

// Population mean of demand times clipped click-through rate when their
// latent normals are correlated at -rho (positive rho = anticorrelation).
double coupled_mean(double mu_d, double sigma_d, double a, double b, double rho) {
  const int steps = 2400;  // Simpson rule over [-12, 12]
  const double lo = -12.0, hi = 12.0;
  const double h = (hi - lo) / steps;
  double resid = std::sqrt(std::max(0.0, 1.0 - rho * rho)) * b;
  auto f = [&](double z) {
    double pz = detail::clipped_mean(a - b * rho * z, resid);
    return std::exp(mu_d + sigma_d * z) * pz *
           (0.3989422804014326779 * std::exp(-0.5 * z * z));
  };
  double sum = f(lo) + f(hi);
  for (int i = 1; i < steps; ++i) {
    sum += f(lo + i * h) * ((i % 2) ? 4.0 : 2.0);
  }
  return sum * h / 3.0;
}

std::string padded(int value, int width) {
  std::string s = std::to_string(value);
  while (static_cast<int>(s.size()) < width) s.insert(s.begin(), '0');
  return s;
}

void check_spec(const GeneratorSpec& s) {
  auto bad = [](const std::string& msg) { throw std::invalid_argument("generate: " + msg); };
  if (s.n < 1) bad("n must be at least 1");
  if (s.m < 1) bad("m must be at least 1");
  if (!(s.demand.mean > 0.0)) bad("demand mean must be positive");
  if (!(s.ctr.mean >= 0.0 && s.ctr.mean <= 1.0)) bad("click-through mean must be in [0,1]");
  if (!(s.cvr.mean >= 0.0 && s.cvr.mean <= 1.0)) bad("conversion mean must be in [0,1]");
  for (const auto* t : {&s.demand, &s.ctr, &s.cvr, &s.vps, &s.cpc}) {
    if (!std::isfinite(t->mean) || !std::isfinite(t->sd) || t->sd < 0.0 || t->mean < 0.0) {
      bad("targets must be finite and nonnegative");
    }
  }
  if (!(s.noise_rel >= 0.0) || !std::isfinite(s.noise_rel)) bad("noise_rel must be nonnegative");
  if (!s.budgets.empty()) {
    if (static_cast<int>(s.budgets.size()) != s.m) bad("budgets must list one entry per adgroup");
    for (double b : s.budgets) {
      if (!(b > 0.0) || !std::isfinite(b)) bad("budgets must be positive");
    }
  }
  if (!s.ctr_scale.empty()) {
    if (static_cast<int>(s.ctr_scale.size()) != s.m) bad("ctr_scale must list one entry per adgroup");
    for (double c : s.ctr_scale) {
      if (!(c > 0.0) || !std::isfinite(c)) bad("ctr_scale entries must be positive");
    }
  }
  if (!(s.alpha >= 0.5 && s.alpha < 1.0)) bad("alpha must lie in [0.5, 1)");
  if (!(s.risk_tolerance > 0.0)) bad("risk tolerance must be positive");
  if (s.product_label_count < 0 || s.hierarchy_label_count < 0) bad("label counts must be nonnegative");
  if (!std::isfinite(s.cost_mean)) bad("cost_mean must be finite");
}

}  // namespace

GeneratorSpec GeneratorSpec::preset_small() { return GeneratorSpec{}; }

GeneratorSpec GeneratorSpec::preset_large() {
  GeneratorSpec s;
  s.n = 305;
  s.m = 3;
  s.demand = {289.57, 2279.9};
  s.ctr = {0.17, 0.23};
  s.cvr = {0.35, 0.57};
  s.vps = {21.90, 54.53};
  s.cpc = {1.15, 0.40};
  s.cost_mean = 8.95;
  return s;
}

ProblemInstance generate(const GeneratorSpec& spec, Diagnostics* diag) {
  check_spec(spec);
  Diagnostics local;
  Diagnostics& dg = diag ? *diag : local;

  detail::ClipFit ctr_fit = detail::fit_clipped(spec.ctr.mean, spec.ctr.sd);
  detail::ClipFit cvr_fit = detail::fit_clipped(spec.cvr.mean, spec.cvr.sd);
  auto report_fit = [&dg](const char* name, const detail::ClipFit& fit) {
    if (fit.sd_clamped) {
      dg.warn(std::string(name) + " rate sd target unreachable for a [0,1] variable; clamped to " +
              std::to_string(fit.sd_reached));
    }
    double frac = detail::clipped_fraction(fit.a, fit.b);
    if (frac >= 0.5) {
      dg.warn(std::string(name) + " rate distribution is mostly boundary mass (" +
              std::to_string(frac * 100.0) + "% clipped); nearly a two-point law");
    } else if (frac >= 0.2) {
      dg.warn(std::string(name) + " rate target needs heavy clipping (" +
              std::to_string(frac * 100.0) + "% of mass)");
    }
  };
  report_fit("click-through", ctr_fit);
  report_fit("conversion", cvr_fit);

  LognormalFit demand_fit = fit_lognormal(spec.demand, "demand");
  LognormalFit vps_fit = fit_lognormal(spec.vps, "value per sale");
  LognormalFit cpc_fit = fit_lognormal(spec.cpc, "cost per click");

  // Calibrate the demand / click-through anticorrelation against the spend
  // mean target.
  double rho = 0.0;
  if (spec.cost_mean > 0.0) {
    if (demand_fit.sigma > 0.0 && ctr_fit.b > 0.0 && spec.cpc.mean > 0.0) {
      double needed = spec.cost_mean / spec.cpc.mean;
      auto mean_at = [&](double r) {
        return coupled_mean(demand_fit.mu, demand_fit.sigma, ctr_fit.a, ctr_fit.b, r);
      };
      double hi_mean = mean_at(-0.999);  // strongest positive coupling
      double lo_mean = mean_at(0.999);   // strongest anticorrelation
      if (needed >= hi_mean) {
        rho = -0.999;
        dg.warn("spend mean target above the reachable range; using the strongest positive coupling");
      } else if (needed <= lo_mean) {
        rho = 0.999;
        dg.warn("spend mean target below the reachable range; using the strongest anticorrelation");
      } else {
        double lo = -0.999, hi = 0.999;
        for (int it = 0; it < 60; ++it) {
          double mid = 0.5 * (lo + hi);
          if (mean_at(mid) > needed) {
            lo = mid;
          } else {
            hi = mid;
          }
        }
        rho = 0.5 * (lo + hi);
      }
    } else {
      dg.warn("spend mean target ignored: demand or click-through rate has no spread to couple");
    }
  }

  const int n = spec.n, m = spec.m;
  int width = std::max<int>(4, static_cast<int>(std::to_string(n).size()));
  int n_products = spec.product_label_count > 0 ? spec.product_label_count
                                                : std::max(2, (3 * m) / 2);
  int n_tiers = spec.hierarchy_label_count > 0 ? spec.hierarchy_label_count : 2 * m + 1;

  Rng rng_demand(mix_seed(spec.seed, 1));
  Rng rng_couple(mix_seed(spec.seed, 2));
  Rng rng_cvr(mix_seed(spec.seed, 3));
  Rng rng_vps(mix_seed(spec.seed, 4));
  Rng rng_cpc(mix_seed(spec.seed, 5));
  Rng rng_label(mix_seed(spec.seed, 6));

  const double resid = std::sqrt(std::max(0.0, 1.0 - rho * rho));
  std::vector<KeywordStat> kws(n);
  int tiny = 0;
  for (int i = 0; i < n; ++i) {
    KeywordStat& k = kws[i];
    k.id = "kw_" + padded(i + 1, width);
    double z = rng_demand.standard_normal();
    k.demand = demand_fit.sigma > 0.0 ? std::exp(demand_fit.mu + demand_fit.sigma * z)
                                      : spec.demand.mean;
    double u = -rho * z + resid * rng_couple.standard_normal();
    double ctr_base = ctr_fit.b > 0.0 ? std::clamp(ctr_fit.a + ctr_fit.b * u, 0.0, 1.0)
                                      : ctr_fit.a;
    double vn = rng_cvr.standard_normal();
    double cvr_base = cvr_fit.b > 0.0 ? std::clamp(cvr_fit.a + cvr_fit.b * vn, 0.0, 1.0)
                                      : cvr_fit.a;
    k.value_per_sale = draw_lognormal(vps_fit, rng_vps);
    double price = draw_lognormal(cpc_fit, rng_cpc);
    k.product_label = "prod_" + std::to_string(rng_label.below(n_products) + 1);
    k.hierarchy_label = "tier_" + std::to_string(rng_label.below(n_tiers) + 1);
    k.ctr.resize(m);
    k.cvr.resize(m);
    k.cpc.resize(m);
    for (int j = 0; j < m; ++j) {
      double scale = spec.ctr_scale.empty() ? 1.0 : spec.ctr_scale[j];
      double mean_c = std::min(1.0, ctr_base * scale);
      k.ctr[j] = Moments2{mean_c, spec.noise_rel * mean_c};
      k.cvr[j] = Moments2{cvr_base, spec.noise_rel * cvr_base};
      k.cpc[j] = price;
    }
    if (k.demand * k.ctr[0].mean < 10.0 || k.demand * (1.0 - k.ctr[0].mean) < 10.0) ++tiny;
  }
  if (tiny > 0) {
    dg.warn(std::to_string(tiny) + " of " + std::to_string(n) +
            " keywords have too few expected clicks or misses for the normal spend "
            "approximation to be reliable");
  }

  std::vector<AdGroupSpec> groups(m);
  for (int j = 0; j < m; ++j) {
    groups[j].id = "g" + std::to_string(j + 1);
    groups[j].budget = spec.budgets.empty() ? 10000.0 / m : spec.budgets[j];
    groups[j].alpha = spec.alpha;
  }
  return ProblemInstance(std::move(kws), std::move(groups), spec.risk_tolerance);
}

std::vector<KeywordStat> estimate_stats(const std::vector<ReportRow>& rows, int m,
                                        Diagnostics* diag) {
  if (m < 1) throw std::invalid_argument("estimate_stats: m must be at least 1");
  Diagnostics local;
  Diagnostics& dg = diag ? *diag : local;

  std::vector<std::string> order;
  std::map<std::string, std::vector<const ReportRow*>> by_kw;
  for (const auto& r : rows) {
    if (r.keyword_id.empty()) throw std::invalid_argument("estimate_stats: empty keyword id");
    if (r.impressions < 0 || r.clicks < 0 || r.conversions < 0 || !(r.cost >= 0.0) ||
        !(r.revenue >= 0.0) || !std::isfinite(r.cost) || !std::isfinite(r.revenue)) {
      throw std::invalid_argument("estimate_stats: negative or non-finite figures for keyword '" +
                                  r.keyword_id + "' period '" + r.period + "'");
    }
    if (r.clicks > r.impressions) {
      dg.warn("keyword '" + r.keyword_id + "' period '" + r.period +
              "': more clicks than impressions");
    }
    if (r.conversions > r.clicks) {
      dg.warn("keyword '" + r.keyword_id + "' period '" + r.period +
              "': more conversions than clicks");
    }
    auto [it, fresh] = by_kw.try_emplace(r.keyword_id);
    if (fresh) order.push_back(r.keyword_id);
    it->second.push_back(&r);
  }

  auto mean_sd = [](const std::vector<double>& v) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    double sd = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
    return Moments2{mean, sd};
  };

  std::vector<KeywordStat> out;
  out.reserve(order.size());
  int tiny = 0, single = 0;
  for (const auto& id : order) {
    const auto& periods = by_kw[id];
    KeywordStat k;
    k.id = id;
    std::vector<double> imps, ctrs, cvrs, costs;
    long long clicks_total = 0, conv_total = 0;
    double cost_total = 0.0, revenue_total = 0.0;
    for (const ReportRow* r : periods) {
      imps.push_back(static_cast<double>(r->impressions));
      if (r->impressions > 0) {
        ctrs.push_back(static_cast<double>(r->clicks) / static_cast<double>(r->impressions));
      } else {
        ctrs.push_back(0.0);
        dg.warn("keyword '" + id + "' period '" + r->period + "': no impressions");
      }
      if (r->clicks > 0) {
        cvrs.push_back(static_cast<double>(r->conversions) / static_cast<double>(r->clicks));
      } else {
        cvrs.push_back(0.0);
      }
      costs.push_back(r->cost);
      clicks_total += r->clicks;
      conv_total += r->conversions;
      cost_total += r->cost;
      revenue_total += r->revenue;
      if (k.product_label.empty()) k.product_label = r->product_label;
      if (k.hierarchy_label.empty()) k.hierarchy_label = r->hierarchy_label;
    }
    if (periods.size() == 1) ++single;
    Moments2 dstat = mean_sd(imps);
    k.demand = dstat.mean;
    Moments2 ctr = mean_sd(ctrs);
    ctr.mean = std::clamp(ctr.mean, 0.0, 1.0);
    Moments2 cvr = mean_sd(cvrs);
    cvr.mean = std::clamp(cvr.mean, 0.0, 1.0);
    double cpc = clicks_total > 0 ? cost_total / static_cast<double>(clicks_total) : 0.0;
    if (clicks_total == 0 && cost_total > 0.0) {
      dg.warn("keyword '" + id + "': spend without clicks; cost per click set to 0");
    }
    k.value_per_sale = conv_total > 0 ? revenue_total / static_cast<double>(conv_total) : 0.0;
    if (conv_total == 0 && revenue_total > 0.0) {
      dg.warn("keyword '" + id + "': revenue without conversions; value per sale set to 0");
    }
    Moments2 cost = mean_sd(costs);
    k.ctr.assign(m, ctr);
    k.cvr.assign(m, cvr);
    k.cpc.assign(m, cpc);
    k.cost.assign(m, cost);
    if (k.demand * ctr.mean < 10.0 || k.demand * (1.0 - ctr.mean) < 10.0) ++tiny;
    out.push_back(std::move(k));
  }
  if (single > 0) {
    dg.warn(std::to_string(single) +
            " keywords have a single reporting period; their spread estimates are zero");
  }
  if (tiny > 0) {
    dg.warn(std::to_string(tiny) + " of " + std::to_string(out.size()) +
            " keywords have too few expected clicks or misses for the normal spend "
            "approximation to be reliable");
  }
  return out;
}

}  // namespace kwgroup

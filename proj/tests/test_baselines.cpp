#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "kwgroup/baselines.hpp"
#include "kwgroup/bnb.hpp"
#include "kwgroup/chance.hpp"
#include "test_util.hpp"

using namespace kwgroup;
using testutil::random_instance;

namespace {

bool budgets_hold(const ProblemInstance& inst, const Assignment& x) {
  for (int j = 0; j < inst.m(); ++j) {
    if (deterministic_budget_lhs(inst, x.column(j), j) > inst.adgroup(j).budget) {
      return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("baseline names are stable") {
  CHECK(std::string(baseline_name(BaselineKind::SingleGroup)) == "single_group");
  CHECK(std::string(baseline_name(BaselineKind::ProductLabels)) == "product_labels");
  CHECK(std::string(baseline_name(BaselineKind::Clustered)) == "clustered");
  CHECK(std::string(baseline_name(BaselineKind::HierarchyLabels)) == "hierarchy_labels");
  CHECK(std::string(baseline_name(BaselineKind::Greedy)) == "greedy");
}

TEST_CASE("single-group baseline merges budgets and takes best columns") {
  Rng rng(91);
  ProblemInstance inst = random_instance(rng, 8, 3, false);
  BaselineRun run = run_baseline(BaselineKind::SingleGroup, inst, 0);

  REQUIRE(run.instance.m() == 1);
  CHECK(run.instance.adgroup(0).id == "merged");
  CHECK(run.instance.adgroup(0).budget ==
        Catch::Approx(inst.total_budget()).epsilon(1e-12));
  // confidence level follows the largest original budget
  int widest = 0;
  for (int j = 1; j < inst.m(); ++j) {
    if (inst.adgroup(j).budget > inst.adgroup(widest).budget) widest = j;
  }
  CHECK(run.instance.adgroup(0).alpha == inst.adgroup(widest).alpha);
  // each keyword carries its most profitable column
  for (int i = 0; i < inst.n(); ++i) {
    double best = inst.pair_profit(i, 0);
    for (int j = 1; j < inst.m(); ++j) best = std::max(best, inst.pair_profit(i, j));
    CHECK(run.instance.pair_profit(i, 0) == Catch::Approx(best).epsilon(1e-12));
  }
  CHECK(budgets_hold(run.instance, run.assignment));
}

TEST_CASE("label baselines keep each label together") {
  Rng rng(92);
  for (BaselineKind kind : {BaselineKind::ProductLabels, BaselineKind::HierarchyLabels}) {
    ProblemInstance inst = random_instance(rng, 12, 2, false);
    BaselineRun run = run_baseline(kind, inst, 7);
    CHECK(run.instance.m() == inst.m());
    CHECK(budgets_hold(run.instance, run.assignment));
    std::map<std::string, std::set<int>> columns_of_label;
    for (int i = 0; i < inst.n(); ++i) {
      const int j = run.assignment.column_of(i);
      if (j < 0) continue;
      const std::string& label = kind == BaselineKind::ProductLabels
                                     ? inst.keyword(i).product_label
                                     : inst.keyword(i).hierarchy_label;
      columns_of_label[label].insert(j);
    }
    for (const auto& [label, cols] : columns_of_label) {
      INFO("label " << label);
      CHECK(cols.size() == 1);
    }
  }
}

TEST_CASE("label baselines require labels") {
  Rng rng(93);
  ProblemInstance inst = random_instance(rng, 4, 2, false);
  auto kws = inst.keywords();
  kws[2].product_label.clear();
  ProblemInstance unlabeled(kws, inst.adgroups(), inst.risk_tolerance());
  CHECK_THROWS_AS(run_baseline(BaselineKind::ProductLabels, unlabeled, 0),
                  std::invalid_argument);
  // hierarchy labels are still present
  CHECK_NOTHROW(run_baseline(BaselineKind::HierarchyLabels, unlabeled, 0));
}

TEST_CASE("clustered baseline is deterministic and feasible") {
  Rng rng(94);
  ProblemInstance inst = random_instance(rng, 10, 3, false);
  BaselineRun a = run_baseline(BaselineKind::Clustered, inst, 3);
  BaselineRun b = run_baseline(BaselineKind::Clustered, inst, 3);
  CHECK(a.assignment == b.assignment);
  CHECK(budgets_hold(a.instance, a.assignment));
}

TEST_CASE("greedy baseline equals the solver's greedy start and honors risk") {
  Rng rng(95);
  ProblemInstance inst = random_instance(rng, 10, 2, true);
  BaselineRun run = run_baseline(BaselineKind::Greedy, inst, 0);
  CHECK(run.assignment == greedy_assignment(inst));
  CHECK(budgets_hold(run.instance, run.assignment));
  CHECK(risk_feasible(run.instance, run.assignment));
}

TEST_CASE("kmeans recovers well-separated blobs") {
  std::vector<std::vector<double>> points;
  for (int i = 0; i < 10; ++i) {
    points.push_back({0.0 + 0.01 * i, 1.0});
    points.push_back({8.0 + 0.01 * i, -3.0});
  }
  std::vector<int> labels = kmeans_labels(points, 2, 5);
  REQUIRE(labels.size() == points.size());
  // even indices form one blob, odd the other
  for (std::size_t p = 2; p < points.size(); ++p) {
    CHECK(labels[p] == labels[p % 2]);
  }
  CHECK(labels[0] != labels[1]);
}

TEST_CASE("kmeans labels stay in range and respect k") {
  Rng rng(96);
  std::vector<std::vector<double>> points;
  for (int i = 0; i < 30; ++i) {
    points.push_back({rng.uniform(), rng.uniform(), rng.uniform()});
  }
  for (int k : {1, 2, 5}) {
    std::vector<int> labels = kmeans_labels(points, k, 11);
    std::set<int> used(labels.begin(), labels.end());
    CHECK(*used.begin() >= 0);
    CHECK(*used.rbegin() < k);
    if (k == 1) CHECK(used.size() == 1);
  }
  std::vector<int> a = kmeans_labels(points, 3, 4);
  std::vector<int> b = kmeans_labels(points, 3, 4);
  CHECK(a == b);
}

TEST_CASE("baselines other than greedy chase profit not risk") {
  // a risk cap of nearly zero: only the risk-aware baseline returns an
  // assignment that respects it
  Rng rng(97);
  ProblemInstance base = random_instance(rng, 8, 2, false);
  ProblemInstance tight = base.with_risk_tolerance(1e-9);
  BaselineRun greedy = run_baseline(BaselineKind::Greedy, tight, 0);
  CHECK(risk_feasible(tight, greedy.assignment));
  BaselineRun merged = run_baseline(BaselineKind::SingleGroup, tight, 0);
  // the merged strategy fills the budget regardless of the cap
  CHECK(merged.assignment.n_assigned() > 0);
  CHECK_FALSE(risk_feasible(merged.instance, merged.assignment));
}

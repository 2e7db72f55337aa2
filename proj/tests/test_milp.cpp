#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "dsom/instance.hpp"
#include "dsom/milp.hpp"
#include "dsom/scenario.hpp"

using namespace dsom;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Minimal hand-built model: rows get synthetic tags.
Model toy_model(int m, int n, const std::vector<Eigen::Triplet<double>>& trips,
                const std::vector<double>& rhs, const std::vector<char>& sense,
                const std::vector<double>& lo, const std::vector<double>& hi,
                const std::vector<double>& obj, const std::vector<int>& bins) {
  Model model;
  model.lp.A.resize(m, n);
  model.lp.A.setFromTriplets(trips.begin(), trips.end());
  model.lp.rhs = Eigen::Map<const VectorXd>(rhs.data(), m);
  model.lp.sense = sense;
  model.lp.lo = Eigen::Map<const VectorXd>(lo.data(), n);
  model.lp.hi = Eigen::Map<const VectorXd>(hi.data(), n);
  model.lp.obj = Eigen::Map<const VectorXd>(obj.data(), n);
  model.integer_cols.assign(n, 0);
  for (int c : bins) model.integer_cols[c] = 1;
  for (int r = 0; r < m; ++r) {
    RowTag tag{RowFamily::drag_floor, r, 0, -1};
    model.row_tags.push_back(tag);
    model.tag_to_row.emplace(tag, r);
  }
  return model;
}

}  // namespace

TEST_CASE("three-item knapsack against enumeration") {
  // min -5a -4b -3c  s.t. 2a + 3b + c <= 5, binaries
  Model m = toy_model(1, 3, {{0, 0, 2.0}, {0, 1, 3.0}, {0, 2, 1.0}}, {5.0},
                      {'<'}, {0, 0, 0}, {1, 1, 1}, {-5, -4, -3}, {0, 1, 2});
  MilpSolution bb = solve_milp(m);
  MilpSolution bf = brute_force_milp(m);
  REQUIRE(bb.status == MilpStatus::optimal);
  REQUIRE(bf.status == MilpStatus::optimal);
  CHECK(bb.objective == doctest::Approx(-9.0).epsilon(1e-9));
  CHECK(bf.objective == doctest::Approx(-9.0).epsilon(1e-9));
  CHECK(bb.binary_values == std::vector<double>{1.0, 1.0, 0.0});
  CHECK(bf.binary_values == std::vector<double>{1.0, 1.0, 0.0});
}

TEST_CASE("integral relaxation takes the root node only") {
  // min -x s.t. x <= 1, x binary: relaxation is already integral
  Model m = toy_model(1, 1, {{0, 0, 1.0}}, {1.0}, {'<'}, {0.0}, {1.0}, {-1.0},
                      {0});
  MilpSolution s = solve_milp(m);
  REQUIRE(s.status == MilpStatus::optimal);
  CHECK(s.objective == doctest::Approx(-1.0));
  CHECK(s.node_count == 1);
}

TEST_CASE("fractional relaxation branches") {
  // min -x-y s.t. x + y <= 1.5, binaries: relaxation fractional, optimum -1
  Model m = toy_model(1, 2, {{0, 0, 1.0}, {0, 1, 1.0}}, {1.5}, {'<'},
                      {0.0, 0.0}, {1.0, 1.0}, {-1.0, -1.0}, {0, 1});
  MilpSolution s = solve_milp(m);
  REQUIRE(s.status == MilpStatus::optimal);
  CHECK(s.objective == doctest::Approx(-1.0));
  CHECK(s.node_count > 1);
  MilpSolution bf = brute_force_milp(m);
  CHECK(bf.objective == doctest::Approx(-1.0));
}

TEST_CASE("infeasible binaries report the violated row") {
  Model m = toy_model(1, 1, {{0, 0, 1.0}}, {2.0}, {'>'}, {0.0}, {1.0}, {1.0},
                      {0});
  MilpSolution s = solve_milp(m);
  REQUIRE(s.status == MilpStatus::infeasible);
  CHECK(s.infeasible_hint == m.row_name(0));
  MilpSolution bf = brute_force_milp(m);
  CHECK(bf.status == MilpStatus::infeasible);
}

TEST_CASE("brute force refuses oversized problems") {
  auto [inst, scen] = builtin_case(CaseMode::deterministic);
  Model m = assemble(inst, scen);  // 25 binaries
  CHECK_THROWS_AS(brute_force_milp(m), std::invalid_argument);
}

TEST_CASE("two-hour builtin equals exhaustive enumeration") {
  auto [inst24, scen24] = builtin_case(CaseMode::deterministic);
  Instance inst = truncate_horizon(inst24, 2);
  ScenarioSet scen = build_scenarios(inst, CaseMode::deterministic);
  Model m = assemble(inst, scen);
  REQUIRE(m.binary_columns().size() == 3);
  MilpSolution bb = solve_milp(m);
  MilpSolution bf = brute_force_milp(m);
  REQUIRE(bb.status == MilpStatus::optimal);
  REQUIRE(bf.status == MilpStatus::optimal);
  CHECK(bb.objective == doctest::Approx(bf.objective).epsilon(1e-9));
}

TEST_CASE("pricing resolve reproduces the incumbent objective") {
  auto [inst24, scen24] = builtin_case(CaseMode::single_uncertainty);
  Instance inst = truncate_horizon(inst24, 3);
  ScenarioSet scen = build_scenarios(inst, CaseMode::single_uncertainty);
  Model m = assemble(inst, scen);
  MilpSolution s = solve_milp(m);
  REQUIRE(s.status == MilpStatus::optimal);
  LpSolution priced = fix_and_price(m, s.binary_values);
  REQUIRE(priced.status == LpStatus::optimal);
  CHECK(priced.objective == doctest::Approx(s.objective).epsilon(1e-10));
  // duals exist for every row
  CHECK(priced.row_dual.size() == m.lp.rows());
}

TEST_CASE("infeasible assignment is rejected with infeasible status") {
  // empty availability window forces the commitment binary to zero; pinning
  // it to one contradicts the terminal charge window
  auto [inst24, scen24] = builtin_case(CaseMode::deterministic);
  Instance inst = truncate_horizon(inst24, 3);
  ScenarioSet scen = build_scenarios(inst, CaseMode::deterministic);
  Model m = assemble(inst, scen);
  MilpSolution s = solve_milp(m);
  REQUIRE(s.status == MilpStatus::optimal);
  std::vector<double> flipped = s.binary_values;
  flipped.back() = 1.0;  // station commitment is the last binary
  LpSolution bad = fix_and_price(m, flipped);
  CHECK(bad.status == LpStatus::infeasible);
}

TEST_CASE("assignment size is checked") {
  auto [inst24, scen24] = builtin_case(CaseMode::deterministic);
  Instance inst = truncate_horizon(inst24, 2);
  Model m = assemble(inst, build_scenarios(inst, CaseMode::deterministic));
  CHECK_THROWS_AS(fix_and_price(m, {1.0}), std::invalid_argument);
}

TEST_CASE("solver determinism across repeated runs") {
  auto [inst24, scen24] = builtin_case(CaseMode::single_uncertainty);
  Instance inst = truncate_horizon(inst24, 4);
  ScenarioSet scen = build_scenarios(inst, CaseMode::single_uncertainty);
  Model m = assemble(inst, scen);
  MilpSolution a = solve_milp(m);
  MilpSolution b = solve_milp(m);
  CHECK(a.objective == b.objective);
  CHECK(a.node_count == b.node_count);
  CHECK(a.binary_values == b.binary_values);
  CHECK((a.pricing.row_dual - b.pricing.row_dual).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("unbounded continuous part is reported") {
  Model m = toy_model(1, 2, {{0, 0, 1.0}, {0, 1, 1.0}}, {0.0}, {'>'},
                      {0.0, 0.0}, {1.0, kInf}, {0.0, -1.0}, {0});
  MilpSolution s = solve_milp(m);
  CHECK(s.status == MilpStatus::unbounded);
}

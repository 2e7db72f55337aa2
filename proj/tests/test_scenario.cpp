#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "dsom/instance.hpp"
#include "dsom/scenario.hpp"

using namespace dsom;

namespace {

// interval masses of the standard normal on [k-1/2, k+1/2], tails absorbing;
// frozen from an independent high-precision CDF evaluation
constexpr double kW0 = 0.3829249225480262;
constexpr double kW1 = 0.24173033745712882;
constexpr double kW2 = 0.06059753594308193;
constexpr double kW3 = 0.006209665325776135;

}  // namespace

TEST_CASE("seven point weights match the normal interval masses") {
  const QuantizedFactor f = seven_point_normal(VectorXd::Ones(4), 0.1, 1);
  CHECK(f.weights[3] == doctest::Approx(kW0).epsilon(1e-14));
  CHECK(f.weights[2] == doctest::Approx(kW1).epsilon(1e-14));
  CHECK(f.weights[4] == doctest::Approx(kW1).epsilon(1e-14));
  CHECK(f.weights[1] == doctest::Approx(kW2).epsilon(1e-14));
  CHECK(f.weights[5] == doctest::Approx(kW2).epsilon(1e-14));
  CHECK(f.weights[0] == doctest::Approx(kW3).epsilon(1e-12));
  CHECK(f.weights[6] == doctest::Approx(kW3).epsilon(1e-12));
  // tail absorption makes the sum exact, not merely close
  CHECK(f.weights.sum() == 1.0);
}

TEST_CASE("weights are independent of sigma") {
  const QuantizedFactor a = seven_point_normal(VectorXd::Ones(1), 0.0, 1);
  const QuantizedFactor b = seven_point_normal(VectorXd::Ones(1), 0.5, -1);
  for (int k = 0; k < 7; ++k) CHECK(a.weights[k] == b.weights[k]);
  for (int k = 0; k < 7; ++k) CHECK(a.values(k, 0) == 1.0);  // sigma 0 collapse
}

TEST_CASE("deviates scale linearly in k sigma") {
  const QuantizedFactor f =
      seven_point_normal(VectorXd::Constant(2, 3.0), 0.08, -1);
  CHECK(f.values(2 + 3, 0) == doctest::Approx(3.0 - 2 * 0.24).epsilon(1e-12));
  CHECK(f.values(-3 + 3, 1) == doctest::Approx(3.0 * 1.24).epsilon(1e-12));
}

TEST_CASE("negative sigma is rejected") {
  CHECK_THROWS_AS(seven_point_normal(VectorXd::Ones(1), -0.1, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(seven_point_normal(VectorXd::Ones(1), 0.1, 2),
                  std::invalid_argument);
}

TEST_CASE("discrete renewable table") {
  auto [inst, unused] = builtin_case(CaseMode::single_uncertainty);
  const ScenarioSet set = discrete_reag_scenarios(
      inst, {{1.0, 0.1}, {1.5, 0.1}, {3.0, 0.6}, {2.0, 0.1}, {2.5, 0.1}});
  REQUIRE(set.count() == 5);
  const double probs[5] = {0.1, 0.1, 0.6, 0.1, 0.1};
  const double prods[5] = {1.0, 1.5, 3.0, 2.0, 2.5};
  for (int w = 0; w < 5; ++w) {
    CHECK(set.scenarios[w].probability == probs[w]);
    for (int t = 0; t < 24; ++t)
      CHECK(set.scenarios[w].reag_cap(t, 0) == prods[w]);
    // rt prices carry the flagged premium over day-ahead
    for (int t = 0; t < 24; ++t)
      CHECK(set.scenarios[w].rt_buy[t] ==
            doctest::Approx(inst.prices.da_energy[t] + 2.0));
  }
  CHECK(validate_scenarios(inst, set).empty());
}

TEST_CASE("single-row table collapses to a deterministic set") {
  auto [inst, unused] = builtin_case(CaseMode::single_uncertainty);
  const ScenarioSet set = discrete_reag_scenarios(inst, {{3.0, 1.0}});
  REQUIRE(set.count() == 1);
  CHECK(set.scenarios[0].probability == 1.0);
}

TEST_CASE("probability sum violations are rejected") {
  auto [inst, unused] = builtin_case(CaseMode::single_uncertainty);
  CHECK_THROWS_AS(discrete_reag_scenarios(inst, {{1.0, 0.5}, {2.0, 0.4}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(discrete_reag_scenarios(inst, {{1.0, -0.5}, {2.0, 1.5}}),
                  std::invalid_argument);
}

TEST_CASE("comonotone joint composition") {
  auto [inst, unused] = builtin_case(CaseMode::multi_uncertainty);
  const int T = inst.horizon.count();
  const VectorXd ones = VectorXd::Ones(T);
  const QuantizedFactor reag = seven_point_normal(ones, 0.08, -1);
  const QuantizedFactor load = seven_point_normal(ones, 0.15, 1);
  const QuantizedFactor price =
      seven_point_normal(inst.prices.da_energy, 0.05, 1);
  const ScenarioSet set = compose_joint(inst, reag, load, price);
  REQUIRE(set.count() == 7);

  const int bus5 = inst.network.bus_position(5);
  // scenario k=+3: load up 45%, renewable down 24%
  const Scenario& hi = set.scenarios[6];
  CHECK(hi.load_p(0, bus5) == doctest::Approx(3.0 * 1.45).epsilon(1e-12));
  CHECK(hi.reag_cap(0, 0) == doctest::Approx(3.0 * 0.76).epsilon(1e-12));
  CHECK(hi.rt_sell[0] == doctest::Approx(0.8 * hi.rt_buy[0]).epsilon(1e-12));

  // monotone coupling: buy price nondecreasing, renewable nonincreasing
  for (int w = 1; w < 7; ++w)
    for (int t = 0; t < T; ++t) {
      CHECK(set.scenarios[w].rt_buy[t] >= set.scenarios[w - 1].rt_buy[t]);
      CHECK(set.scenarios[w].reag_cap(t, 0) <=
            set.scenarios[w - 1].reag_cap(t, 0));
    }
  double psum = 0.0;
  for (const Scenario& s : set.scenarios) psum += s.probability;
  CHECK(psum == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(validate_scenarios(inst, set).empty());
}

TEST_CASE("zero-sigma joint composition is seven copies of the forecast") {
  auto [inst, unused] = builtin_case(CaseMode::multi_uncertainty);
  const int T = inst.horizon.count();
  const VectorXd ones = VectorXd::Ones(T);
  const ScenarioSet set =
      compose_joint(inst, seven_point_normal(ones, 0.0, -1),
                    seven_point_normal(ones, 0.0, 1),
                    seven_point_normal(inst.prices.da_energy, 0.0, 1));
  for (const Scenario& s : set.scenarios) {
    CHECK((s.load_p - inst.loads.p).cwiseAbs().maxCoeff() == 0.0);
    CHECK(s.reag_cap(0, 0) == 3.0);
  }
}

TEST_CASE("factor length mismatch is rejected") {
  auto [inst, unused] = builtin_case(CaseMode::multi_uncertainty);
  const QuantizedFactor bad = seven_point_normal(VectorXd::Ones(3), 0.1, 1);
  const QuantizedFactor good =
      seven_point_normal(VectorXd::Ones(inst.horizon.count()), 0.1, 1);
  CHECK_THROWS_AS(compose_joint(inst, bad, good, good), std::invalid_argument);
}

TEST_CASE("builtin scenario sets match their modes") {
  {
    auto [inst, scen] = builtin_case(CaseMode::deterministic);
    REQUIRE(scen.count() == 1);
    CHECK(scen.scenarios[0].probability == 1.0);
    CHECK(scen.scenarios[0].reag_cap(0, 0) == 3.0);
    // deterministic premium is zero: both stages price identically
    CHECK(scen.scenarios[0].rt_buy[0] == inst.prices.da_energy[0]);
  }
  {
    auto [inst, scen] = builtin_case(CaseMode::single_uncertainty);
    REQUIRE(scen.count() == 5);
    CHECK(inst.flags.rt_sell_allowed == false);
    CHECK(inst.flags.rt_premium == 2.0);
  }
  {
    auto [inst, scen] = builtin_case(CaseMode::multi_uncertainty);
    REQUIRE(scen.count() == 7);
    CHECK(inst.flags.rt_sell_allowed == true);
    for (int t = 0; t < 24; ++t)
      CHECK(scen.scenarios[4].rt_sell[t] ==
            doctest::Approx(0.8 * scen.scenarios[4].rt_buy[t]));
  }
}

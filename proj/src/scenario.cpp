#include "dsom/scenario.hpp"


#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dsom {

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

VectorXd rt_buy_series(const Instance& inst) {
  return inst.prices.da_energy.array() + inst.flags.rt_premium;
}

Scenario base_scenario(const Instance& inst) {
  Scenario s;
  const int T = inst.horizon.count();
  const int nr = static_cast<int>(inst.reags.size());
  s.reag_cap.resize(T, nr);
  for (int k = 0; k < nr; ++k) s.reag_cap.col(k) = inst.reags[k].p_forecast_max;
  s.load_p = inst.loads.p;
  s.load_q = inst.loads.q;
  s.rt_buy = rt_buy_series(inst);
  s.rt_sell = s.rt_buy * inst.flags.rt_sell_ratio;
  return s;
}

}  // namespace

QuantizedFactor seven_point_normal(const VectorXd& mean, double sigma_frac,
                                   int direction) {
  if (sigma_frac < 0.0) throw std::invalid_argument("sigma_frac must be >= 0");
  if (direction != 1 && direction != -1)
    throw std::invalid_argument("direction must be +1 or -1");

  QuantizedFactor f;
  f.mean = mean;
  const int T = static_cast<int>(mean.size());
  f.values.resize(7, T);
  for (int k = -3; k <= 3; ++k)
    f.values.row(k + 3) =
        mean.transpose().array() * (1.0 + direction * k * sigma_frac);

  const double w0 = normal_cdf(0.5) - normal_cdf(-0.5);
  const double w1 = normal_cdf(1.5) - normal_cdf(0.5);
  const double w2 = normal_cdf(2.5) - normal_cdf(1.5);
  const double tail = 0.5 * (1.0 - (w0 + 2.0 * w1 + 2.0 * w2));  // absorbs
  f.weights << tail, w2, w1, w0, w1, w2, tail;
  return f;
}

ScenarioSet discrete_reag_scenarios(
    const Instance& inst, const std::vector<std::pair<double, double>>& rows) {
  double psum = 0.0;
  for (const auto& [p, prob] : rows) {
    if (prob <= 0.0) throw std::invalid_argument("probabilities must be positive");
    psum += prob;
  }
  if (std::abs(psum - 1.0) > 1e-9)
    throw std::invalid_argument("probabilities must sum to 1");

  ScenarioSet set;
  const int T = inst.horizon.count();
  const int nr = static_cast<int>(inst.reags.size());
  int id = 1;
  for (const auto& [prod, prob] : rows) {
    Scenario s = base_scenario(inst);
    s.id = id++;
    s.probability = prob;
    s.reag_cap = MatrixXd::Constant(T, nr, prod);
    set.scenarios.push_back(std::move(s));
  }
  return set;
}

ScenarioSet compose_joint(const Instance& inst, const QuantizedFactor& reag,
                          const QuantizedFactor& load,
                          const QuantizedFactor& price) {
  if (reag.values.rows() != 7 || load.values.rows() != 7 || price.values.rows() != 7)
    throw std::invalid_argument("factors must have 7 points");
  const int T = inst.horizon.count();
  if (reag.values.cols() != T || load.values.cols() != T || price.values.cols() != T)
    throw std::invalid_argument("factor length mismatch");

  ScenarioSet set;
  const int nr = static_cast<int>(inst.reags.size());
  for (int k = -3; k <= 3; ++k) {
    Scenario s = base_scenario(inst);
    s.id = k + 4;
    s.probability = load.weights[k + 3];
    // the renewable factor is quantized with the opposite direction, so the
    // same row pairs load/price at +k sigma with production at -k sigma
    for (int t = 0; t < T; ++t) {
      const double load_ratio =
          load.mean[t] != 0.0 ? load.values(k + 3, t) / load.mean[t] : 1.0;
      for (int n = 0; n < inst.network.bus_count(); ++n) {
        s.load_p(t, n) = inst.loads.p(t, n) * load_ratio;
        s.load_q(t, n) = inst.loads.q(t, n) * load_ratio;
      }
      const double reag_ratio =
          reag.mean[t] != 0.0 ? reag.values(k + 3, t) / reag.mean[t] : 1.0;
      for (int r = 0; r < nr; ++r)
        s.reag_cap(t, r) = inst.reags[r].p_forecast_max[t] * reag_ratio;
      s.rt_buy[t] = price.values(k + 3, t);
      s.rt_sell[t] = s.rt_buy[t] * inst.flags.rt_sell_ratio;
    }
    set.scenarios.push_back(std::move(s));
  }
  return set;
}

ScenarioSet deterministic_scenarios(const Instance& inst) {
  ScenarioSet set;
  Scenario s = base_scenario(inst);
  s.id = 1;
  s.probability = 1.0;
  set.scenarios.push_back(std::move(s));
  return set;
}

std::vector<ScenarioFinding> validate_scenarios(const Instance& inst,
                                                const ScenarioSet& scen) {
  std::vector<ScenarioFinding> out;
  const int T = inst.horizon.count();
  double psum = 0.0;
  std::vector<int> ids;
  for (int w = 0; w < scen.count(); ++w) {
    const Scenario& s = scen.scenarios[w];
    const std::string path = "scenarios[" + std::to_string(w) + "]";
    if (s.probability <= 0.0)
      out.push_back({path + ".probability", "must be positive"});
    psum += s.probability;
    if (std::find(ids.begin(), ids.end(), s.id) != ids.end())
      out.push_back({path + ".id", "duplicate scenario id"});
    ids.push_back(s.id);
    if (s.reag_cap.minCoeff() < 0.0 || s.load_p.minCoeff() < 0.0)
      out.push_back({path, "realizations must be nonnegative"});
    for (int t = 0; t < T; ++t)
      if (s.rt_sell[t] > s.rt_buy[t] + 1e-12) {
        out.push_back({path + ".rt_sell", "exceeds rt_buy"});
        break;
      }
  }
  if (scen.count() > 0 && std::abs(psum - 1.0) > 1e-12)
    out.push_back({"scenarios", "probabilities must sum to 1"});
  return out;
}

}  // namespace dsom

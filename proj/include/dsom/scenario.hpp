#pragma once

#include <utility>
#include <vector>

#include "dsom/types.hpp"

namespace dsom {

// A random factor quantized to seven points at k sigma, k = -3..3.
// weights are standard-normal interval masses with the tails absorbing the
// remainder, so they sum to one exactly.
struct QuantizedFactor {
  VectorXd mean;                     // per hour
  MatrixXd values;                   // 7 x hours, row k+3
  Eigen::Array<double, 7, 1> weights;
};

QuantizedFactor seven_point_normal(const VectorXd& mean, double sigma_frac,
                                   int direction);

// One scenario per (production MW, probability) row: the realization is flat
// across hours, loads stay at base, real-time prices come from the instance
// flags (buy = day-ahead + premium).
ScenarioSet discrete_reag_scenarios(const Instance& inst,
                                    const std::vector<std::pair<double, double>>& rows);

// Comonotone 7-scenario coupling: scenario k pairs load and price at +k sigma
// with renewable production at -k sigma; rt sell = sell ratio x rt buy.
ScenarioSet compose_joint(const Instance& inst, const QuantizedFactor& reag,
                          const QuantizedFactor& load, const QuantizedFactor& price);

// Single scenario at the forecast with probability one.
ScenarioSet deterministic_scenarios(const Instance& inst);

struct ScenarioFinding {
  std::string path;
  std::string message;
};

std::vector<ScenarioFinding> validate_scenarios(const Instance& inst,
                                                const ScenarioSet& scen);

}  // namespace dsom

#pragma once

// Default parameter values shared by the instance parser and the builtin
// case. The price series are configuration shipped with the tool, not data
// from any external source; everything here is overridable in the instance
// document and shows up in the provenance log as "default".

#include <cmath>
#include <vector>

#include "dsom/types.hpp"

namespace dsom::defaults {

inline double tan_phi() { return std::tan(std::acos(0.95)); }

// 24-hour shapes, tiled cyclically for other horizon lengths.
inline const std::vector<double>& da_energy_shape() {
  static const std::vector<double> v = {
      21.0, 20.0, 19.5, 19.0, 19.8, 22.0, 24.0, 28.0, 32.2, 34.1, 35.3, 36.2,
      36.8, 36.4, 35.1, 34.6, 36.6, 40.2, 44.1, 46.3, 43.2, 37.4, 30.1, 25.2};
  return v;
}

inline const std::vector<double>& cap_up_shape() {
  static const std::vector<double> v = {5, 5, 5, 5, 5, 5, 6, 6, 6, 6, 6, 6,
                                        6, 6, 6, 7, 7, 8, 8, 8, 7, 6, 5, 5};
  return v;
}

inline VectorXd tile(const std::vector<double>& shape, int T) {
  VectorXd out(T);
  for (int t = 0; t < T; ++t) out[t] = shape[t % shape.size()];
  return out;
}

inline VectorXd da_energy(int T) { return tile(da_energy_shape(), T); }
inline VectorXd cap_up(int T) { return tile(cap_up_shape(), T); }
inline VectorXd cap_dn(int T) { return cap_up(T).array() - 1.0; }
inline VectorXd mil_up(int T) { return VectorXd::Constant(T, 2.0); }
inline VectorXd mil_dn(int T) { return VectorXd::Constant(T, 1.5); }
inline VectorXd mileage_ratio(int T) { return VectorXd::Constant(T, 1.0); }
inline VectorXd performance_score(int T) { return VectorXd::Constant(T, 0.9); }

// aggregator regulation offer defaults, $/MW and $/MW-mile
inline RegPrices drag_reg(int T) {
  return {VectorXd::Constant(T, 2.5), VectorXd::Constant(T, 2.5),
          VectorXd::Constant(T, 1.0), VectorXd::Constant(T, 1.0)};
}
inline RegPrices esag_reg(int T) {
  return {VectorXd::Constant(T, 3.0), VectorXd::Constant(T, 3.0),
          VectorXd::Constant(T, 1.5), VectorXd::Constant(T, 1.5)};
}
inline RegPrices evcs_reg(int T) {
  return {VectorXd::Constant(T, 2.0), VectorXd::Constant(T, 2.0),
          VectorXd::Constant(T, 1.0), VectorXd::Constant(T, 1.0)};
}
inline RegPrices ddg_reg(int T) {
  return {VectorXd::Constant(T, 2.8), VectorXd::Constant(T, 2.8),
          VectorXd::Constant(T, 1.0), VectorXd::Constant(T, 1.0)};
}

constexpr double kLineR = 0.01;
constexpr double kLineX = 0.02;
constexpr double kPlMax = 20.0;
constexpr double kQlMax = 20.0;
constexpr double kVMin = 0.95;
constexpr double kVMax = 1.05;
constexpr double kSBase = 10.0;
constexpr double kEvcsClMax = 20.0;

}  // namespace dsom::defaults

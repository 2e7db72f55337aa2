#include <utility>

#include "dsom/instance.hpp"
#include "dsom/scenario.hpp"

#include "defaults.hpp"

namespace dsom {

namespace {

// Case-study table: renewable production realizations and probabilities.
const std::vector<std::pair<double, double>>& reag_table() {
  static const std::vector<std::pair<double, double>> rows = {
      {1.0, 0.1}, {1.5, 0.1}, {3.0, 0.6}, {2.0, 0.1}, {2.5, 0.1}};
  return rows;
}

Instance builtin_instance() {
  Instance inst;
  const int T = 24;
  for (int t = 1; t <= T; ++t) inst.horizon.hours.push_back(t);
  inst.provenance["horizon"] = "paper";

  Network& net = inst.network;
  net.buses = {1, 2, 3, 4, 5};
  net.substation_bus = 1;
  net.v_min = defaults::kVMin;
  net.v_max = defaults::kVMax;
  net.pl_max = defaults::kPlMax;
  net.ql_max = defaults::kQlMax;
  net.s_base_mva = defaults::kSBase;
  for (int j = 1; j <= 4; ++j)
    net.branches.push_back({j, j, j + 1, defaults::kLineR, defaults::kLineX});
  inst.provenance["network.buses"] = "paper";
  inst.provenance["network.substation_bus"] = "default";
  inst.provenance["network.branches.topology"] = "default";
  inst.provenance["network.branches.impedance"] = "default";
  inst.provenance["network.v_limits"] = "default";
  inst.provenance["network.flow_limits"] = "default";
  inst.provenance["network.s_base_mva"] = "default";

  // demand response aggregator at bus 2, three 10 MW blocks with strictly
  // decreasing bids
  {
    DragSpec s;
    s.id = "drag1";
    s.bus = 2;
    s.r_up_max = 1.0;
    s.r_dn_max = 1.0;
    s.tan_phi = defaults::tan_phi();
    const VectorXd da = defaults::da_energy(T);
    for (double f : {1.25, 0.95, 0.65}) s.blocks.push_back({10.0, da * f});
    s.reg = defaults::drag_reg(T);
    inst.drags.push_back(std::move(s));
    inst.provenance["drag1.block_p_max"] = "paper";
    inst.provenance["drag1.r_max"] = "paper";
    inst.provenance["drag1.placement"] = "default";
    inst.provenance["drag1.blocks"] = "default";
    inst.provenance["drag1.tan_phi"] = "default";
    inst.provenance["drag1.reg_prices"] = "default";
  }

  // energy storage aggregator at bus 3
  {
    EsagSpec s;
    s.id = "esag1";
    s.bus = 3;
    s.e_min = 2.0;
    s.e_max = 10.0;
    s.e_init = 8.0;
    s.cr_max = 5.0;
    s.dr_max = 5.0;
    s.eta_ch = 1.0;
    s.eta_di = 1.0;
    s.price_energy = defaults::da_energy(T) * 0.98;
    s.reg = defaults::esag_reg(T);
    inst.esags.push_back(std::move(s));
    inst.provenance["esag1.energy_limits"] = "paper";
    inst.provenance["esag1.rates"] = "paper";
    inst.provenance["esag1.efficiencies"] = "paper";
    inst.provenance["esag1.placement"] = "default";
    inst.provenance["esag1.energy_price"] = "default";
    inst.provenance["esag1.reg_prices"] = "default";
  }

  // EV charging station at bus 4, connected hours 16..24
  {
    EvcsSpec s;
    s.id = "evcs1";
    s.bus = 4;
    s.er_max = 5.0;
    s.err_max = 0.5;
    s.cl_max = defaults::kEvcsClMax;
    s.e_init = 2.0;
    s.gamma_ch = 1.0;
    for (int h = 16; h <= 24; ++h) s.window.push_back(h);
    s.price_energy = VectorXd::Constant(T, 39.0);
    s.reg = defaults::evcs_reg(T);
    inst.evcss.push_back(std::move(s));
    inst.provenance["evcs1.rates"] = "paper";
    inst.provenance["evcs1.e_init"] = "paper";
    inst.provenance["evcs1.window"] = "paper";
    inst.provenance["evcs1.cl_max_mwh"] = "default";
    inst.provenance["evcs1.gamma_ch"] = "default";
    inst.provenance["evcs1.placement"] = "default";
    inst.provenance["evcs1.energy_price"] = "default";
    inst.provenance["evcs1.reg_prices"] = "default";
  }

  // dispatchable DG aggregator at bus 5
  {
    DdgagSpec s;
    s.id = "ddg1";
    s.bus = 5;
    s.p_min = 0.0;
    s.p_max = 5.0;
    s.ru = 1.0;
    s.rd = 1.0;
    s.tan_phi = defaults::tan_phi();
    s.price_energy = VectorXd::Constant(T, 31.5);
    s.reg = defaults::ddg_reg(T);
    inst.ddgags.push_back(std::move(s));
    inst.provenance["ddg1.limits"] = "paper";
    inst.provenance["ddg1.ramps"] = "paper";
    inst.provenance["ddg1.placement"] = "default";
    inst.provenance["ddg1.tan_phi"] = "default";
    inst.provenance["ddg1.energy_price"] = "default";
    inst.provenance["ddg1.reg_prices"] = "default";
  }

  // renewable aggregator at bus 4, 3 MW schedulable cap
  {
    ReagSpec s;
    s.id = "reag1";
    s.bus = 4;
    s.p_forecast_max = VectorXd::Constant(T, 3.0);
    s.price_energy = VectorXd::Constant(T, 25.0);
    inst.reags.push_back(std::move(s));
    inst.provenance["reag1.p_forecast_max_mw"] = "paper";
    inst.provenance["reag1.placement"] = "default";
    inst.provenance["reag1.energy_price"] = "default";
  }

  inst.prices.da_energy = defaults::da_energy(T);
  inst.prices.cap_up = defaults::cap_up(T);
  inst.prices.cap_dn = defaults::cap_dn(T);
  inst.prices.mil_up = defaults::mil_up(T);
  inst.prices.mil_dn = defaults::mil_dn(T);
  inst.prices.s_up = defaults::mileage_ratio(T);
  inst.prices.s_dn = defaults::mileage_ratio(T);
  inst.prices.mu_up = defaults::performance_score(T);
  inst.prices.mu_dn = defaults::performance_score(T);
  inst.provenance["prices"] = "default";

  // 3 MW inelastic load at bus 5, reactive at 0.95 power factor
  const int nb = inst.network.bus_count();
  inst.loads.p = MatrixXd::Zero(T, nb);
  inst.loads.q = MatrixXd::Zero(T, nb);
  const int pos5 = inst.network.bus_position(5);
  inst.loads.p.col(pos5).setConstant(3.0);
  inst.loads.q.col(pos5).setConstant(3.0 * defaults::tan_phi());
  inst.provenance["loads.p_mw"] = "paper";
  inst.provenance["loads.q_mvar"] = "default";

  return inst;
}

}  // namespace

ScenarioSet build_scenarios(const Instance& inst, CaseMode mode) {
  switch (mode) {
    case CaseMode::deterministic:
      return deterministic_scenarios(inst);
    case CaseMode::single_uncertainty:
      return discrete_reag_scenarios(inst, reag_table());
    case CaseMode::multi_uncertainty: {
      const int T = inst.horizon.count();
      const VectorXd ones = VectorXd::Ones(T);
      const VectorXd rt_base = inst.prices.da_energy.array() + inst.flags.rt_premium;
      const QuantizedFactor reag = seven_point_normal(ones, 0.08, -1);
      const QuantizedFactor load = seven_point_normal(ones, 0.15, 1);
      const QuantizedFactor price = seven_point_normal(rt_base, 0.05, 1);
      return compose_joint(inst, reag, load, price);
    }
  }
  return {};
}

std::pair<Instance, ScenarioSet> builtin_case(CaseMode mode) {
  Instance inst = builtin_instance();
  switch (mode) {
    case CaseMode::deterministic:
      // zero premium keeps real-time prices at day-ahead level so the
      // collapse case prices both stages identically
      inst.flags.rt_sell_allowed = false;
      inst.flags.rt_premium = 0.0;
      inst.provenance["flags.deterministic"] = "default";
      break;
    case CaseMode::single_uncertainty:
      inst.flags.rt_sell_allowed = false;
      inst.flags.rt_premium = 2.0;
      inst.provenance["flags.rt_premium"] = "paper";
      inst.provenance["flags.rt_sell_allowed"] = "paper";
      break;
    case CaseMode::multi_uncertainty:
      inst.flags.rt_sell_allowed = true;
      inst.flags.rt_premium = 0.0;
      inst.flags.rt_sell_ratio = 0.8;
      inst.provenance["flags.rt_sell_ratio"] = "paper";
      inst.provenance["flags.rt_premium"] = "default";
      break;
  }
  ScenarioSet scen = build_scenarios(inst, mode);
  return {std::move(inst), std::move(scen)};
}

}  // namespace dsom

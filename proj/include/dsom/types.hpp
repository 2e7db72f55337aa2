#pragma once

#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace dsom {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Operating timespan. Hour labels are arbitrary increasing integers (the
// builtin case uses 1..24); everything else indexes by position in `hours`.
struct TimeHorizon {
  std::vector<int> hours;

  int count() const { return static_cast<int>(hours.size()); }
  int position_of(int hour) const {
    for (int i = 0; i < count(); ++i)
      if (hours[i] == hour) return i;
    return -1;
  }
};

struct Branch {
  int id = 0;
  int from_bus = 0;
  int to_bus = 0;
  double r = 0.0;       // per-unit
  double x = 0.0;       // per-unit
  double pl_max = 0.0;  // MW; 0 inherits the network-wide limit
  double ql_max = 0.0;  // MVAr; 0 inherits
};

// Radial distribution network. Branch orientation defines the signed
// incidence: +1 at the from-bus, -1 at the to-bus.
struct Network {
  std::vector<int> buses;
  std::vector<Branch> branches;
  int substation_bus = 1;
  double v_min = 0.95;
  double v_max = 1.05;
  double pl_max = 20.0;  // MW per branch
  double ql_max = 20.0;  // MVAr per branch
  double s_base_mva = 10.0;

  int bus_count() const { return static_cast<int>(buses.size()); }
  int branch_count() const { return static_cast<int>(branches.size()); }
  int bus_position(int bus) const {
    for (int i = 0; i < bus_count(); ++i)
      if (buses[i] == bus) return i;
    return -1;
  }
  // Signed branch-bus incidence by positions.
  int incidence(int branch_pos, int bus_pos) const {
    const Branch& b = branches[branch_pos];
    if (bus_position(b.from_bus) == bus_pos) return 1;
    if (bus_position(b.to_bus) == bus_pos) return -1;
    return 0;
  }
  double branch_pl_max(int branch_pos) const {
    const double v = branches[branch_pos].pl_max;
    return v > 0.0 ? v : pl_max;
  }
  double branch_ql_max(int branch_pos) const {
    const double v = branches[branch_pos].ql_max;
    return v > 0.0 ? v : ql_max;
  }
};

// Regulation capacity / mileage offer prices, one value per hour.
struct RegPrices {
  VectorXd cap_up;
  VectorXd cap_dn;
  VectorXd mil_up;
  VectorXd mil_dn;
};

struct DragBlock {
  double p_max = 0.0;  // MW
  VectorXd bid;        // $/MWh per hour
};

struct DragSpec {
  std::string id;
  int bus = 0;
  std::vector<DragBlock> blocks;
  double r_up_max = 0.0;
  double r_dn_max = 0.0;
  double tan_phi = 0.0;
  RegPrices reg;
};

struct EsagSpec {
  std::string id;
  int bus = 0;
  double e_min = 0.0, e_max = 0.0, e_init = 0.0;  // MWh
  double cr_max = 0.0, dr_max = 0.0;              // MW
  double eta_ch = 1.0, eta_di = 1.0;
  VectorXd price_energy;
  RegPrices reg;
};

struct EvcsSpec {
  std::string id;
  int bus = 0;
  double er_max = 0.0;   // MW
  double err_max = 0.0;  // MW
  double cl_max = 0.0;   // MWh
  double e_init = 0.0;   // MWh
  double gamma_ch = 1.0;
  std::vector<int> window;  // hour labels when EVs are connected
  VectorXd price_energy;
  RegPrices reg;
};

struct DdgagSpec {
  std::string id;
  int bus = 0;
  double p_min = 0.0, p_max = 0.0;  // MW
  double ru = 0.0, rd = 0.0;        // MW
  double tan_phi = 0.0;
  VectorXd price_energy;
  RegPrices reg;
};

struct ReagSpec {
  std::string id;
  int bus = 0;
  VectorXd p_forecast_max;  // MW per hour, day-ahead schedulable cap
  VectorXd price_energy;    // informational; not part of the DSO objective
};

// Wholesale market price data (system level, per hour).
struct PriceData {
  VectorXd da_energy;  // $/MWh
  VectorXd cap_up, cap_dn;  // $/MW
  VectorXd mil_up, mil_dn;  // $/MW-mile
  VectorXd s_up, s_dn;      // mileage ratios, mile per MW
  VectorXd mu_up, mu_dn;    // performance scores in [0,1]
};

// Deterministic base inelastic load, (hour x bus-position).
struct LoadProfile {
  MatrixXd p;  // MW
  MatrixXd q;  // MVAr
};

struct InstanceFlags {
  bool rt_sell_allowed = true;
  double rt_premium = 0.0;     // added to day-ahead price for rt buy
  double rt_sell_ratio = 0.8;  // rt sell price as fraction of rt buy
  bool evcs_eq23_strict = true;
};

struct Instance {
  TimeHorizon horizon;
  Network network;
  std::vector<DragSpec> drags;
  std::vector<EsagSpec> esags;
  std::vector<EvcsSpec> evcss;
  std::vector<DdgagSpec> ddgags;
  std::vector<ReagSpec> reags;
  PriceData prices;
  LoadProfile loads;
  InstanceFlags flags;
  // parameter path -> "paper" | "default" | "file"
  std::map<std::string, std::string> provenance;
};

// One joint second-stage realization.
struct Scenario {
  int id = 0;
  double probability = 0.0;
  MatrixXd reag_cap;  // (hour x reag) realized available production, MW
  MatrixXd load_p;    // (hour x bus)
  MatrixXd load_q;
  VectorXd rt_buy;   // $/MWh per hour
  VectorXd rt_sell;  // $/MWh per hour
};

struct ScenarioSet {
  std::vector<Scenario> scenarios;
  int count() const { return static_cast<int>(scenarios.size()); }
};

enum class CaseMode { deterministic, single_uncertainty, multi_uncertainty };

const char* to_string(CaseMode mode);
bool case_mode_from_string(const std::string& s, CaseMode& out);

}  // namespace dsom

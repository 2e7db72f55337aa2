#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "dsom/milp.hpp"
#include "dsom/model.hpp"
#include "dsom/types.hpp"

namespace dsom {

// Nodal prices: day-ahead from the balance-row duals, real-time from the
// adjustment-row duals divided by the scenario probability.
struct LmpSurface {
  MatrixXd da;              // hour x bus
  std::vector<MatrixXd> rt; // per scenario, hour x bus
};

LmpSurface extract_lmps(const Model& model, const LpSolution& pricing,
                        const ScenarioSet& scen);

struct AggregatorSettlement {
  std::string id;
  std::string kind;  // drag | esag | evcs | ddgag | reag
  int bus = 0;
  double da_energy_revenue = 0.0;       // at day-ahead LMPs, consumers negative
  double reg_capacity_revenue = 0.0;    // at offer prices
  double reg_mileage_revenue = 0.0;     // at offer prices
  std::vector<double> rt_revenue;       // per scenario, at real-time LMPs
  double expected_rt_revenue = 0.0;
  double expected_total_revenue = 0.0;
};

// DSO objective decomposition; `objective` equals the signed sum of the
// other fields.
struct DsoBreakdown {
  double wholesale_energy_cost = 0.0;
  double wholesale_reg_capacity_revenue = 0.0;
  double wholesale_reg_mileage_revenue = 0.0;
  double aggregator_energy_cost = 0.0;   // esag + ddgag paid
  double evcs_energy_revenue = 0.0;      // consumption paid to the DSO
  double drag_energy_revenue = 0.0;
  double aggregator_reg_cost = 0.0;      // capacity + mileage paid out
  double expected_rt_cost = 0.0;
  double objective = 0.0;
};

struct SettlementReport {
  std::vector<AggregatorSettlement> aggregators;
  DsoBreakdown dso;
};

SettlementReport settle(const Model& model, const MilpSolution& sol,
                        const LmpSurface& lmps, const ScenarioSet& scen);

enum class SweepMode { rt_premium_scale, sell_buy_spread_scale };

const char* to_string(SweepMode m);

struct SweepRecord {
  double multiplier = 0.0;
  bool solved = false;
  std::string error;
  double reag_da_revenue = 0.0;
  double reag_expected_rt_revenue = 0.0;
  double reag_total_revenue = 0.0;
  double reag_da_schedule_mwh = 0.0;     // summed over hours and reags
  double reag_da_schedule_max_mw = 0.0;  // largest hourly schedule
  double expected_rt_traded_mwh = 0.0;   // probability-weighted buy+sell
};

struct SweepSeries {
  std::vector<SweepRecord> records;
};

// Re-solves the case once per multiplier with scaled real-time prices.
// rt_premium_scale multiplies both rt prices by i; sell_buy_spread_scale
// widens the spread (sell / i, buy * i) so compensation costs grow with i.
SweepSeries sensitivity_sweep(const Instance& inst, CaseMode scen_mode,
                              const std::vector<double>& multipliers,
                              SweepMode mode, const MilpOptions& opts = {});

// Scenario-set copy with scaled real-time prices (the per-case transform the
// sweep applies).
ScenarioSet scale_rt_prices(const ScenarioSet& scen, double multiplier,
                            SweepMode mode);

// CSV emitters. Fixed headers, fixed row order, full double precision.
void write_lmps_da_csv(std::ostream& os, const Model& model, const LmpSurface& lmps);
void write_lmps_rt_csv(std::ostream& os, const Model& model, const LmpSurface& lmps,
                       const ScenarioSet& scen);
void write_settlement_csv(std::ostream& os, const SettlementReport& rep,
                          const ScenarioSet& scen);
void write_sweep_csv(std::ostream& os, const SweepSeries& series);
void write_solution_csv(std::ostream& os, const Model& model, const VectorXd& x);

}  // namespace dsom

#include "dsom/pricing.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "dsom/instance.hpp"

namespace dsom {

const char* to_string(SweepMode m) {
  return m == SweepMode::rt_premium_scale ? "rt_premium" : "spread";
}

LmpSurface extract_lmps(const Model& model, const LpSolution& pricing,
                        const ScenarioSet& scen) {
  LmpSurface out;
  const int T = model.instance.horizon.count();
  const int nb = model.instance.network.bus_count();
  out.da.resize(T, nb);
  for (int t = 0; t < T; ++t)
    for (int n = 0; n < nb; ++n)
      out.da(t, n) = pricing.row_dual[model.row_of({RowFamily::balance_p, n, t, -1})];
  for (int w = 0; w < scen.count(); ++w) {
    MatrixXd rt(T, nb);
    const double prob = scen.scenarios[w].probability;
    for (int t = 0; t < T; ++t)
      for (int n = 0; n < nb; ++n)
        rt(t, n) =
            pricing.row_dual[model.row_of({RowFamily::adj_p, n, t, w})] / prob;
    out.rt.push_back(std::move(rt));
  }
  return out;
}

namespace {

double capacity_revenue(const RegPrices& offer, const VectorXd& r_up,
                        const VectorXd& r_dn) {
  double v = 0.0;
  for (int t = 0; t < r_up.size(); ++t)
    v += r_up[t] * offer.cap_up[t] + r_dn[t] * offer.cap_dn[t];
  return v;
}

double mileage_revenue(const PriceData& pr, const RegPrices& offer,
                       const VectorXd& r_up, const VectorXd& r_dn) {
  double v = 0.0;
  for (int t = 0; t < r_up.size(); ++t) {
    v += r_up[t] * pr.s_up[t] * pr.mu_up[t] * offer.mil_up[t];
    v += r_dn[t] * pr.s_dn[t] * pr.mu_dn[t] * offer.mil_dn[t];
  }
  return v;
}

}  // namespace

SettlementReport settle(const Model& model, const MilpSolution& sol,
                        const LmpSurface& lmps, const ScenarioSet& scen) {
  SettlementReport rep;
  const Instance& inst = model.instance;
  const VariableIndex& idx = model.index;
  const PriceData& pr = inst.prices;
  const int T = inst.horizon.count();
  const int W = scen.count();

  auto hourly = [&](VarKind kind, int owner) {
    VectorXd v(T);
    for (int t = 0; t < T; ++t) v[t] = sol.x[idx.at({kind, owner, -1, t, -1})];
    return v;
  };

  for (int k = 0; k < static_cast<int>(inst.drags.size()); ++k) {
    const DragSpec& s = inst.drags[k];
    AggregatorSettlement a;
    a.id = s.id;
    a.kind = "drag";
    a.bus = s.bus;
    const int n = inst.network.bus_position(s.bus);
    for (int t = 0; t < T; ++t)
      for (int b = 0; b < static_cast<int>(s.blocks.size()); ++b)
        a.da_energy_revenue -=
            sol.x[idx.at({VarKind::drag_block_p, k, b, t, -1})] * lmps.da(t, n);
    a.reg_capacity_revenue = capacity_revenue(s.reg, hourly(VarKind::drag_r_up, k),
                                              hourly(VarKind::drag_r_dn, k));
    a.reg_mileage_revenue = mileage_revenue(pr, s.reg, hourly(VarKind::drag_r_up, k),
                                            hourly(VarKind::drag_r_dn, k));
    a.rt_revenue.assign(W, 0.0);
    rep.aggregators.push_back(std::move(a));
  }
  for (int k = 0; k < static_cast<int>(inst.esags.size()); ++k) {
    const EsagSpec& s = inst.esags[k];
    AggregatorSettlement a;
    a.id = s.id;
    a.kind = "esag";
    a.bus = s.bus;
    const int n = inst.network.bus_position(s.bus);
    for (int t = 0; t < T; ++t)
      a.da_energy_revenue +=
          sol.x[idx.at({VarKind::esag_p, k, -1, t, -1})] * lmps.da(t, n);
    a.reg_capacity_revenue = capacity_revenue(s.reg, hourly(VarKind::esag_r_up, k),
                                              hourly(VarKind::esag_r_dn, k));
    a.reg_mileage_revenue = mileage_revenue(pr, s.reg, hourly(VarKind::esag_r_up, k),
                                            hourly(VarKind::esag_r_dn, k));
    a.rt_revenue.assign(W, 0.0);
    rep.aggregators.push_back(std::move(a));
  }
  for (int k = 0; k < static_cast<int>(inst.evcss.size()); ++k) {
    const EvcsSpec& s = inst.evcss[k];
    AggregatorSettlement a;
    a.id = s.id;
    a.kind = "evcs";
    a.bus = s.bus;
    const int n = inst.network.bus_position(s.bus);
    for (int t = 0; t < T; ++t)
      a.da_energy_revenue -=
          sol.x[idx.at({VarKind::evcs_p, k, -1, t, -1})] * lmps.da(t, n);
    a.reg_capacity_revenue = capacity_revenue(s.reg, hourly(VarKind::evcs_r_up, k),
                                              hourly(VarKind::evcs_r_dn, k));
    a.reg_mileage_revenue = mileage_revenue(pr, s.reg, hourly(VarKind::evcs_r_up, k),
                                            hourly(VarKind::evcs_r_dn, k));
    a.rt_revenue.assign(W, 0.0);
    rep.aggregators.push_back(std::move(a));
  }
  for (int k = 0; k < static_cast<int>(inst.ddgags.size()); ++k) {
    const DdgagSpec& s = inst.ddgags[k];
    AggregatorSettlement a;
    a.id = s.id;
    a.kind = "ddgag";
    a.bus = s.bus;
    const int n = inst.network.bus_position(s.bus);
    for (int t = 0; t < T; ++t)
      a.da_energy_revenue +=
          sol.x[idx.at({VarKind::ddg_p, k, -1, t, -1})] * lmps.da(t, n);
    a.reg_capacity_revenue = capacity_revenue(s.reg, hourly(VarKind::ddg_r_up, k),
                                              hourly(VarKind::ddg_r_dn, k));
    a.reg_mileage_revenue = mileage_revenue(pr, s.reg, hourly(VarKind::ddg_r_up, k),
                                            hourly(VarKind::ddg_r_dn, k));
    a.rt_revenue.assign(W, 0.0);
    rep.aggregators.push_back(std::move(a));
  }
  for (int k = 0; k < static_cast<int>(inst.reags.size()); ++k) {
    const ReagSpec& s = inst.reags[k];
    AggregatorSettlement a;
    a.id = s.id;
    a.kind = "reag";
    a.bus = s.bus;
    const int n = inst.network.bus_position(s.bus);
    a.rt_revenue.assign(W, 0.0);
    for (int t = 0; t < T; ++t) {
      const double sched = sol.x[idx.at({VarKind::reag_p, k, -1, t, -1})];
      a.da_energy_revenue += sched * lmps.da(t, n);
      for (int w = 0; w < W; ++w) {
        const double spill = sol.x[idx.at({VarKind::reag_spill, k, -1, t, w})];
        const double delivered = scen.scenarios[w].reag_cap(t, k) - spill - sched;
        a.rt_revenue[w] += delivered * lmps.rt[w](t, n);
      }
    }
    rep.aggregators.push_back(std::move(a));
  }

  for (AggregatorSettlement& a : rep.aggregators) {
    a.expected_rt_revenue = 0.0;
    for (int w = 0; w < W; ++w)
      a.expected_rt_revenue += scen.scenarios[w].probability * a.rt_revenue[w];
    a.expected_total_revenue = a.da_energy_revenue + a.reg_capacity_revenue +
                               a.reg_mileage_revenue + a.expected_rt_revenue;
  }

  // DSO objective decomposition
  DsoBreakdown& d = rep.dso;
  for (int t = 0; t < T; ++t) {
    d.wholesale_energy_cost +=
        sol.x[idx.at({VarKind::sub_p, -1, -1, t, -1})] * pr.da_energy[t];
    const double rup = sol.x[idx.at({VarKind::sub_r_up, -1, -1, t, -1})];
    const double rdn = sol.x[idx.at({VarKind::sub_r_dn, -1, -1, t, -1})];
    d.wholesale_reg_capacity_revenue += rup * pr.cap_up[t] + rdn * pr.cap_dn[t];
    d.wholesale_reg_mileage_revenue +=
        rup * pr.s_up[t] * pr.mu_up[t] * pr.mil_up[t] +
        rdn * pr.s_dn[t] * pr.mu_dn[t] * pr.mil_dn[t];
  }
  for (int k = 0; k < static_cast<int>(inst.esags.size()); ++k)
    for (int t = 0; t < T; ++t)
      d.aggregator_energy_cost += sol.x[idx.at({VarKind::esag_p, k, -1, t, -1})] *
                                  inst.esags[k].price_energy[t];
  for (int k = 0; k < static_cast<int>(inst.ddgags.size()); ++k)
    for (int t = 0; t < T; ++t)
      d.aggregator_energy_cost += sol.x[idx.at({VarKind::ddg_p, k, -1, t, -1})] *
                                  inst.ddgags[k].price_energy[t];
  for (int k = 0; k < static_cast<int>(inst.evcss.size()); ++k)
    for (int t = 0; t < T; ++t)
      d.evcs_energy_revenue += sol.x[idx.at({VarKind::evcs_p, k, -1, t, -1})] *
                               inst.evcss[k].price_energy[t];
  for (int k = 0; k < static_cast<int>(inst.drags.size()); ++k)
    for (int t = 0; t < T; ++t)
      for (int b = 0; b < static_cast<int>(inst.drags[k].blocks.size()); ++b)
        d.drag_energy_revenue += sol.x[idx.at({VarKind::drag_block_p, k, b, t, -1})] *
                                 inst.drags[k].blocks[b].bid[t];
  for (const AggregatorSettlement& a : rep.aggregators)
    if (a.kind != "reag")
      d.aggregator_reg_cost += a.reg_capacity_revenue + a.reg_mileage_revenue;
  for (int w = 0; w < W; ++w) {
    const Scenario& s = scen.scenarios[w];
    for (int t = 0; t < T; ++t) {
      d.expected_rt_cost +=
          s.probability * (sol.x[idx.at({VarKind::rt_buy, -1, -1, t, w})] * s.rt_buy[t] -
                           sol.x[idx.at({VarKind::rt_sell, -1, -1, t, w})] * s.rt_sell[t]);
    }
  }
  d.objective = sol.objective;
  return rep;
}

ScenarioSet scale_rt_prices(const ScenarioSet& scen, double multiplier,
                            SweepMode mode) {
  ScenarioSet out = scen;
  for (Scenario& s : out.scenarios) {
    if (mode == SweepMode::rt_premium_scale) {
      s.rt_buy *= multiplier;
      s.rt_sell *= multiplier;
    } else {
      s.rt_buy *= multiplier;
      s.rt_sell /= multiplier;
    }
  }
  return out;
}

SweepSeries sensitivity_sweep(const Instance& inst, CaseMode scen_mode,
                              const std::vector<double>& multipliers,
                              SweepMode mode, const MilpOptions& opts) {
  SweepSeries series;
  const ScenarioSet base = build_scenarios(inst, scen_mode);
  for (double i : multipliers) {
    SweepRecord rec;
    rec.multiplier = i;
    const ScenarioSet scen = scale_rt_prices(base, i, mode);
    Model model = assemble(inst, scen);
    MilpSolution sol = solve_milp(model, opts);
    if (sol.status != MilpStatus::optimal ||
        sol.pricing.status != LpStatus::optimal) {
      rec.error = to_string(sol.status);
      series.records.push_back(std::move(rec));
      continue;
    }
    rec.solved = true;
    const LmpSurface lmps = extract_lmps(model, sol.pricing, scen);
    const SettlementReport rep = settle(model, sol, lmps, scen);
    for (const AggregatorSettlement& a : rep.aggregators) {
      if (a.kind != "reag") continue;
      rec.reag_da_revenue += a.da_energy_revenue;
      rec.reag_expected_rt_revenue += a.expected_rt_revenue;
      rec.reag_total_revenue += a.expected_total_revenue;
    }
    const int T = inst.horizon.count();
    for (int k = 0; k < static_cast<int>(inst.reags.size()); ++k)
      for (int t = 0; t < T; ++t) {
        const double p = sol.x[model.index.at({VarKind::reag_p, k, -1, t, -1})];
        rec.reag_da_schedule_mwh += p;
        rec.reag_da_schedule_max_mw = std::max(rec.reag_da_schedule_max_mw, p);
      }
    for (int w = 0; w < scen.count(); ++w)
      for (int t = 0; t < T; ++t)
        rec.expected_rt_traded_mwh +=
            scen.scenarios[w].probability *
            (sol.x[model.index.at({VarKind::rt_buy, -1, -1, t, w})] +
             sol.x[model.index.at({VarKind::rt_sell, -1, -1, t, w})]);
    series.records.push_back(std::move(rec));
  }
  return series;
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void write_lmps_da_csv(std::ostream& os, const Model& model, const LmpSurface& lmps) {
  os << "n,t,price\n";
  const Instance& inst = model.instance;
  for (int n = 0; n < inst.network.bus_count(); ++n)
    for (int t = 0; t < inst.horizon.count(); ++t)
      os << inst.network.buses[n] << "," << inst.horizon.hours[t] << ","
         << fmt(lmps.da(t, n)) << "\n";
}

void write_lmps_rt_csv(std::ostream& os, const Model& model, const LmpSurface& lmps,
                       const ScenarioSet& scen) {
  os << "n,t,w,price\n";
  const Instance& inst = model.instance;
  for (int n = 0; n < inst.network.bus_count(); ++n)
    for (int t = 0; t < inst.horizon.count(); ++t)
      for (int w = 0; w < scen.count(); ++w)
        os << inst.network.buses[n] << "," << inst.horizon.hours[t] << ","
           << scen.scenarios[w].id << "," << fmt(lmps.rt[w](t, n)) << "\n";
}

void write_settlement_csv(std::ostream& os, const SettlementReport& rep,
                          const ScenarioSet& scen) {
  os << "entity,kind,bus,component,scenario,value\n";
  for (const AggregatorSettlement& a : rep.aggregators) {
    const std::string head = a.id + "," + a.kind + "," + std::to_string(a.bus) + ",";
    os << head << "da_energy_revenue,," << fmt(a.da_energy_revenue) << "\n";
    os << head << "reg_capacity_revenue,," << fmt(a.reg_capacity_revenue) << "\n";
    os << head << "reg_mileage_revenue,," << fmt(a.reg_mileage_revenue) << "\n";
    for (size_t w = 0; w < a.rt_revenue.size(); ++w)
      os << head << "rt_revenue," << scen.scenarios[w].id << ","
         << fmt(a.rt_revenue[w]) << "\n";
    os << head << "expected_rt_revenue,," << fmt(a.expected_rt_revenue) << "\n";
    os << head << "expected_total_revenue,," << fmt(a.expected_total_revenue) << "\n";
  }
  const DsoBreakdown& d = rep.dso;
  os << "dso,dso,,wholesale_energy_cost,," << fmt(d.wholesale_energy_cost) << "\n";
  os << "dso,dso,,wholesale_reg_capacity_revenue,,"
     << fmt(d.wholesale_reg_capacity_revenue) << "\n";
  os << "dso,dso,,wholesale_reg_mileage_revenue,,"
     << fmt(d.wholesale_reg_mileage_revenue) << "\n";
  os << "dso,dso,,aggregator_energy_cost,," << fmt(d.aggregator_energy_cost) << "\n";
  os << "dso,dso,,evcs_energy_revenue,," << fmt(d.evcs_energy_revenue) << "\n";
  os << "dso,dso,,drag_energy_revenue,," << fmt(d.drag_energy_revenue) << "\n";
  os << "dso,dso,,aggregator_reg_cost,," << fmt(d.aggregator_reg_cost) << "\n";
  os << "dso,dso,,expected_rt_cost,," << fmt(d.expected_rt_cost) << "\n";
  os << "dso,dso,,objective,," << fmt(d.objective) << "\n";
}

void write_sweep_csv(std::ostream& os, const SweepSeries& series) {
  os << "i,solved,reag_da_revenue,reag_expected_rt_revenue,reag_total_revenue,"
        "reag_da_schedule_mwh,reag_da_schedule_max_mw,expected_rt_traded_mwh,"
        "error\n";
  for (const SweepRecord& r : series.records) {
    os << fmt(r.multiplier) << "," << (r.solved ? 1 : 0) << ","
       << fmt(r.reag_da_revenue) << "," << fmt(r.reag_expected_rt_revenue) << ","
       << fmt(r.reag_total_revenue) << "," << fmt(r.reag_da_schedule_mwh) << ","
       << fmt(r.reag_da_schedule_max_mw) << "," << fmt(r.expected_rt_traded_mwh)
       << "," << r.error << "\n";
  }
}

void write_solution_csv(std::ostream& os, const Model& model, const VectorXd& x) {
  os << "name,value\n";
  for (int c = 0; c < model.lp.cols(); ++c)
    os << model.column_name(c) << "," << fmt(x[c]) << "\n";
}

}  // namespace dsom

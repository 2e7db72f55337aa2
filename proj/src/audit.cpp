#include "dsom/audit.hpp"

#include <algorithm>
#include <cmath>

namespace dsom {

namespace {

void flag(PhysicsReport& rep, double value, double tol, const std::string& what) {
  if (value > tol) rep.violations.push_back(what + " residual " + std::to_string(value));
}

}  // namespace

PhysicsReport audit_solution(const Model& model, const ScenarioSet& scen,
                             const VectorXd& x, double tol) {
  PhysicsReport rep;
  const Instance& inst = model.instance;
  const Network& net = inst.network;
  const VariableIndex& idx = model.index;
  const PriceData& pr = inst.prices;
  const int T = inst.horizon.count();
  const int nb = net.bus_count();
  const int nj = net.branch_count();
  const int sub = net.bus_position(net.substation_bus);

  auto val = [&](VarKind kind, int owner, int t, int w = -1, int sub_i = -1) {
    return x[idx.at({kind, owner, sub_i, t, w})];
  };

  for (int t = 0; t < T; ++t) {
    // day-ahead nodal balances
    for (int n = 0; n < nb; ++n) {
      double p = -inst.loads.p(t, n);
      double q = -inst.loads.q(t, n);
      if (n == sub) {
        p += val(VarKind::sub_p, -1, t);
        q += val(VarKind::sub_q, -1, t);
      }
      for (int k = 0; k < static_cast<int>(inst.esags.size()); ++k)
        if (net.bus_position(inst.esags[k].bus) == n)
          p += val(VarKind::esag_p, k, t);
      for (int k = 0; k < static_cast<int>(inst.ddgags.size()); ++k)
        if (net.bus_position(inst.ddgags[k].bus) == n) {
          p += val(VarKind::ddg_p, k, t);
          q += val(VarKind::ddg_p, k, t) * inst.ddgags[k].tan_phi;
        }
      for (int k = 0; k < static_cast<int>(inst.reags.size()); ++k)
        if (net.bus_position(inst.reags[k].bus) == n)
          p += val(VarKind::reag_p, k, t);
      for (int k = 0; k < static_cast<int>(inst.drags.size()); ++k)
        if (net.bus_position(inst.drags[k].bus) == n)
          for (int a = 0; a < static_cast<int>(inst.drags[k].blocks.size()); ++a) {
            p -= val(VarKind::drag_block_p, k, t, -1, a);
            q -= val(VarKind::drag_block_p, k, t, -1, a) * inst.drags[k].tan_phi;
          }
      for (int k = 0; k < static_cast<int>(inst.evcss.size()); ++k)
        if (net.bus_position(inst.evcss[k].bus) == n)
          p -= val(VarKind::evcs_p, k, t);
      for (int j = 0; j < nj; ++j) {
        const int inc = net.incidence(j, n);
        if (inc != 0) {
          p -= inc * val(VarKind::flow_p, j, t);
          q -= inc * val(VarKind::flow_q, j, t);
        }
      }
      rep.max_active_balance = std::max(rep.max_active_balance, std::abs(p));
      rep.max_reactive_balance = std::max(rep.max_reactive_balance, std::abs(q));
    }

    // wholesale regulation aggregation
    double up = val(VarKind::sub_r_up, -1, t);
    double dn = val(VarKind::sub_r_dn, -1, t);
    for (int k = 0; k < static_cast<int>(inst.esags.size()); ++k) {
      up -= val(VarKind::esag_r_up, k, t);
      dn -= val(VarKind::esag_r_dn, k, t);
    }
    for (int k = 0; k < static_cast<int>(inst.ddgags.size()); ++k) {
      up -= val(VarKind::ddg_r_up, k, t);
      dn -= val(VarKind::ddg_r_dn, k, t);
    }
    for (int k = 0; k < static_cast<int>(inst.drags.size()); ++k) {
      up -= val(VarKind::drag_r_dn, k, t);
      dn -= val(VarKind::drag_r_up, k, t);
    }
    for (int k = 0; k < static_cast<int>(inst.evcss.size()); ++k) {
      up -= val(VarKind::evcs_r_dn, k, t);
      dn -= val(VarKind::evcs_r_up, k, t);
    }
    rep.max_agg_identity =
        std::max({rep.max_agg_identity, std::abs(up), std::abs(dn)});
  }

  // storage: recursion residual, level bounds, mode exclusivity
  for (int k = 0; k < static_cast<int>(inst.esags.size()); ++k) {
    const EsagSpec& s = inst.esags[k];
    double prev = s.e_init;
    for (int t = 0; t < T; ++t) {
      const double e = val(VarKind::esag_e, k, t);
      const double p = val(VarKind::esag_p, k, t);
      const double r_up = val(VarKind::esag_r_up, k, t);
      const double r_dn = val(VarKind::esag_r_dn, k, t);
      const double resid = p - (prev - e + (pr.mu_up[t] / s.eta_di) * r_up -
                                s.eta_ch * pr.mu_dn[t] * r_dn);
      rep.max_storage_residual = std::max(rep.max_storage_residual, std::abs(resid));
      rep.max_storage_bound = std::max({rep.max_storage_bound, s.e_min - e, e - s.e_max});
      const double overlap =
          val(VarKind::esag_p_ch, k, t) * val(VarKind::esag_p_di, k, t);
      rep.max_mode_overlap = std::max(rep.max_mode_overlap, overlap);
      prev = e;
    }
  }

  // EVCS terminal charge window when committed
  for (int k = 0; k < static_cast<int>(inst.evcss.size()); ++k) {
    const EvcsSpec& s = inst.evcss[k];
    const double b = x[idx.at({VarKind::evcs_on, k, -1, -1, -1})];
    if (b < 0.5) continue;
    double total = inst.flags.evcs_eq23_strict ? s.e_init : s.gamma_ch * s.e_init;
    for (int hour : s.window) {
      const int t = inst.horizon.position_of(hour);
      if (t < 0) continue;
      total += s.gamma_ch * (val(VarKind::evcs_p, k, t) +
                             pr.mu_up[t] * val(VarKind::evcs_r_up, k, t) -
                             pr.mu_dn[t] * val(VarKind::evcs_r_dn, k, t));
    }
    rep.max_evcs_target = std::max(
        {rep.max_evcs_target, 0.9 * s.cl_max - total, total - s.cl_max});
  }

  // real-time nodal balances per scenario
  for (int w = 0; w < scen.count(); ++w) {
    const Scenario& sc = scen.scenarios[w];
    for (int t = 0; t < T; ++t) {
      for (int n = 0; n < nb; ++n) {
        double p = -(sc.load_p(t, n) - inst.loads.p(t, n));
        double q = -(sc.load_q(t, n) - inst.loads.q(t, n));
        if (n == sub) {
          p += val(VarKind::rt_buy, -1, t, w) - val(VarKind::rt_sell, -1, t, w);
          q += val(VarKind::rt_sub_q, -1, t, w);
        }
        for (int k = 0; k < static_cast<int>(inst.reags.size()); ++k)
          if (net.bus_position(inst.reags[k].bus) == n)
            p += sc.reag_cap(t, k) - val(VarKind::reag_spill, k, t, w) -
                 val(VarKind::reag_p, k, t);
        for (int j = 0; j < nj; ++j) {
          const int inc = net.incidence(j, n);
          if (inc != 0) {
            p -= inc * (val(VarKind::rt_flow_p, j, t, w) - val(VarKind::flow_p, j, t));
            q -= inc * (val(VarKind::rt_flow_q, j, t, w) - val(VarKind::flow_q, j, t));
          }
        }
        rep.max_rt_active_balance = std::max(rep.max_rt_active_balance, std::abs(p));
        rep.max_rt_reactive_balance =
            std::max(rep.max_rt_reactive_balance, std::abs(q));
      }
    }
  }

  flag(rep, rep.max_active_balance, tol, "day-ahead active balance");
  flag(rep, rep.max_reactive_balance, tol, "day-ahead reactive balance");
  flag(rep, rep.max_rt_active_balance, tol, "real-time active balance");
  flag(rep, rep.max_rt_reactive_balance, tol, "real-time reactive balance");
  flag(rep, rep.max_storage_residual, tol, "storage energy recursion");
  flag(rep, rep.max_storage_bound, tol, "storage level bounds");
  flag(rep, rep.max_mode_overlap, tol, "charge/discharge overlap");
  flag(rep, rep.max_agg_identity, tol, "regulation aggregation identity");
  flag(rep, rep.max_evcs_target, tol, "EVCS terminal charge window");
  return rep;
}

}  // namespace dsom

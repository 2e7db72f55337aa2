#include "dsom/model.hpp"

#include <algorithm>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace dsom {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

const char* to_string(VarKind k) {
  switch (k) {
    case VarKind::sub_p: return "subp";
    case VarKind::sub_q: return "subq";
    case VarKind::sub_r_up: return "subrup";
    case VarKind::sub_r_dn: return "subrdn";
    case VarKind::drag_block_p: return "dragp";
    case VarKind::drag_r_up: return "dragrup";
    case VarKind::drag_r_dn: return "dragrdn";
    case VarKind::esag_e: return "esage";
    case VarKind::esag_p: return "esagp";
    case VarKind::esag_p_ch: return "esagpch";
    case VarKind::esag_p_di: return "esagpdi";
    case VarKind::esag_r_up: return "esagrup";
    case VarKind::esag_r_dn: return "esagrdn";
    case VarKind::esag_r_up_di: return "esagrupdi";
    case VarKind::esag_r_dn_di: return "esagrdndi";
    case VarKind::esag_r_up_ch: return "esagrupch";
    case VarKind::esag_r_dn_ch: return "esagrdnch";
    case VarKind::esag_mode: return "esagmode";
    case VarKind::evcs_p: return "evcsp";
    case VarKind::evcs_r_up: return "evcsrup";
    case VarKind::evcs_r_dn: return "evcsrdn";
    case VarKind::evcs_on: return "evcson";
    case VarKind::ddg_p: return "ddgp";
    case VarKind::ddg_r_up: return "ddgrup";
    case VarKind::ddg_r_dn: return "ddgrdn";
    case VarKind::reag_p: return "reagp";
    case VarKind::flow_p: return "flowp";
    case VarKind::flow_q: return "flowq";
    case VarKind::volt: return "volt";
    case VarKind::rt_buy: return "rtbuy";
    case VarKind::rt_sell: return "rtsell";
    case VarKind::rt_sub_q: return "rtsubq";
    case VarKind::reag_spill: return "spill";
    case VarKind::rt_flow_p: return "rtflowp";
    case VarKind::rt_flow_q: return "rtflowq";
    case VarKind::rt_volt: return "rtvolt";
  }
  return "var";
}

const char* to_string(RowFamily f) {
  switch (f) {
    case RowFamily::drag_floor: return "drag_floor";
    case RowFamily::drag_ceiling: return "drag_ceiling";
    case RowFamily::esag_energy: return "esag_energy";
    case RowFamily::esag_split: return "esag_split";
    case RowFamily::esag_up_mix: return "esag_up_mix";
    case RowFamily::esag_dn_mix: return "esag_dn_mix";
    case RowFamily::esag_di_gate: return "esag_di_gate";
    case RowFamily::esag_up_di_gate: return "esag_up_di_gate";
    case RowFamily::esag_dn_di_gate: return "esag_dn_di_gate";
    case RowFamily::esag_ch_gate: return "esag_ch_gate";
    case RowFamily::esag_up_ch_gate: return "esag_up_ch_gate";
    case RowFamily::esag_dn_ch_gate: return "esag_dn_ch_gate";
    case RowFamily::esag_di_floor: return "esag_di_floor";
    case RowFamily::esag_di_ceiling: return "esag_di_ceiling";
    case RowFamily::esag_ch_floor: return "esag_ch_floor";
    case RowFamily::esag_ch_ceiling: return "esag_ch_ceiling";
    case RowFamily::esag_di_pack: return "esag_di_pack";
    case RowFamily::esag_ch_pack: return "esag_ch_pack";
    case RowFamily::evcs_p_gate: return "evcs_p_gate";
    case RowFamily::evcs_up_gate: return "evcs_up_gate";
    case RowFamily::evcs_dn_gate: return "evcs_dn_gate";
    case RowFamily::evcs_headroom: return "evcs_headroom";
    case RowFamily::evcs_floor: return "evcs_floor";
    case RowFamily::evcs_target_lo: return "evcs_target_lo";
    case RowFamily::evcs_target_hi: return "evcs_target_hi";
    case RowFamily::ddg_ceiling: return "ddg_ceiling";
    case RowFamily::ddg_floor: return "ddg_floor";
    case RowFamily::balance_p: return "balance_p";
    case RowFamily::balance_q: return "balance_q";
    case RowFamily::volt_drop: return "volt_drop";
    case RowFamily::agg_up: return "agg_up";
    case RowFamily::agg_dn: return "agg_dn";
    case RowFamily::adj_p: return "adj_p";
    case RowFamily::adj_q: return "adj_q";
    case RowFamily::volt_adj: return "volt_adj";
  }
  return "row";
}

int VariableIndex::add(const VarKey& key) {
  const int id = count();
  keys_.push_back(key);
  auto [it, inserted] = lookup_.emplace(key, id);
  if (!inserted) throw std::logic_error("duplicate variable key");
  return id;
}

int VariableIndex::at(const VarKey& key) const {
  const int id = find(key);
  if (id < 0) throw std::logic_error("unknown variable key");
  return id;
}

int VariableIndex::find(const VarKey& key) const {
  auto it = lookup_.find(key);
  return it == lookup_.end() ? -1 : it->second;
}

VariableIndex index_variables(const Instance& inst, const ScenarioSet& scen) {
  VariableIndex idx;
  const int T = inst.horizon.count();
  const int nb = inst.network.bus_count();
  const int nj = inst.network.branch_count();

  // first stage, hour-major
  for (int t = 0; t < T; ++t) {
    idx.add({VarKind::sub_p, -1, -1, t, -1});
    idx.add({VarKind::sub_q, -1, -1, t, -1});
    idx.add({VarKind::sub_r_up, -1, -1, t, -1});
    idx.add({VarKind::sub_r_dn, -1, -1, t, -1});
    for (int k = 0; k < static_cast<int>(inst.drags.size()); ++k) {
      for (int a = 0; a < static_cast<int>(inst.drags[k].blocks.size()); ++a)
        idx.add({VarKind::drag_block_p, k, a, t, -1});
      idx.add({VarKind::drag_r_up, k, -1, t, -1});
      idx.add({VarKind::drag_r_dn, k, -1, t, -1});
    }
    for (int k = 0; k < static_cast<int>(inst.esags.size()); ++k) {
      idx.add({VarKind::esag_e, k, -1, t, -1});
      idx.add({VarKind::esag_p, k, -1, t, -1});
      idx.add({VarKind::esag_p_ch, k, -1, t, -1});
      idx.add({VarKind::esag_p_di, k, -1, t, -1});
      idx.add({VarKind::esag_r_up, k, -1, t, -1});
      idx.add({VarKind::esag_r_dn, k, -1, t, -1});
      idx.add({VarKind::esag_r_up_di, k, -1, t, -1});
      idx.add({VarKind::esag_r_dn_di, k, -1, t, -1});
      idx.add({VarKind::esag_r_up_ch, k, -1, t, -1});
      idx.add({VarKind::esag_r_dn_ch, k, -1, t, -1});
      idx.add({VarKind::esag_mode, k, -1, t, -1});
    }
    for (int k = 0; k < static_cast<int>(inst.evcss.size()); ++k) {
      idx.add({VarKind::evcs_p, k, -1, t, -1});
      idx.add({VarKind::evcs_r_up, k, -1, t, -1});
      idx.add({VarKind::evcs_r_dn, k, -1, t, -1});
    }
    for (int k = 0; k < static_cast<int>(inst.ddgags.size()); ++k) {
      idx.add({VarKind::ddg_p, k, -1, t, -1});
      idx.add({VarKind::ddg_r_up, k, -1, t, -1});
      idx.add({VarKind::ddg_r_dn, k, -1, t, -1});
    }
    for (int k = 0; k < static_cast<int>(inst.reags.size()); ++k)
      idx.add({VarKind::reag_p, k, -1, t, -1});
    for (int j = 0; j < nj; ++j) {
      idx.add({VarKind::flow_p, j, -1, t, -1});
      idx.add({VarKind::flow_q, j, -1, t, -1});
    }
    for (int n = 0; n < nb; ++n) idx.add({VarKind::volt, n, -1, t, -1});
  }
  for (int k = 0; k < static_cast<int>(inst.evcss.size()); ++k)
    idx.add({VarKind::evcs_on, k, -1, -1, -1});

  // second stage, scenario-major
  for (int w = 0; w < scen.count(); ++w) {
    for (int t = 0; t < T; ++t) {
      idx.add({VarKind::rt_buy, -1, -1, t, w});
      idx.add({VarKind::rt_sell, -1, -1, t, w});
      idx.add({VarKind::rt_sub_q, -1, -1, t, w});
      for (int k = 0; k < static_cast<int>(inst.reags.size()); ++k)
        idx.add({VarKind::reag_spill, k, -1, t, w});
      for (int j = 0; j < nj; ++j) {
        idx.add({VarKind::rt_flow_p, j, -1, t, w});
        idx.add({VarKind::rt_flow_q, j, -1, t, w});
      }
      for (int n = 0; n < nb; ++n) idx.add({VarKind::rt_volt, n, -1, t, w});
    }
  }
  return idx;
}

int ModelBuilder::add_row(RowFamily family, int owner, int t, int w, char sense,
                          double rhs) {
  const int row = rows();
  rhs_.push_back(rhs);
  sense_.push_back(sense);
  tags_.push_back({family, owner, t, w});
  return row;
}

void ModelBuilder::coeff(int row, int col, double value) {
  if (value != 0.0) trips_.emplace_back(row, col, value);
}

VectorXd build_objective(const Instance& inst, const ScenarioSet& scen,
                         const VariableIndex& idx) {
  const PriceData& pr = inst.prices;
  VectorXd obj = VectorXd::Zero(idx.count());
  const int T = inst.horizon.count();
  for (int t = 0; t < T; ++t) {
    obj[idx.at({VarKind::sub_p, -1, -1, t, -1})] = pr.da_energy[t];
    obj[idx.at({VarKind::sub_r_up, -1, -1, t, -1})] =
        -(pr.cap_up[t] + pr.s_up[t] * pr.mu_up[t] * pr.mil_up[t]);
    obj[idx.at({VarKind::sub_r_dn, -1, -1, t, -1})] =
        -(pr.cap_dn[t] + pr.s_dn[t] * pr.mu_dn[t] * pr.mil_dn[t]);

    for (int k = 0; k < static_cast<int>(inst.drags.size()); ++k) {
      const DragSpec& d = inst.drags[k];
      for (int a = 0; a < static_cast<int>(d.blocks.size()); ++a)
        obj[idx.at({VarKind::drag_block_p, k, a, t, -1})] = -d.blocks[a].bid[t];
      obj[idx.at({VarKind::drag_r_up, k, -1, t, -1})] =
          d.reg.cap_up[t] + pr.s_up[t] * pr.mu_up[t] * d.reg.mil_up[t];
      obj[idx.at({VarKind::drag_r_dn, k, -1, t, -1})] =
          d.reg.cap_dn[t] + pr.s_dn[t] * pr.mu_dn[t] * d.reg.mil_dn[t];
    }
    for (int k = 0; k < static_cast<int>(inst.esags.size()); ++k) {
      const EsagSpec& e = inst.esags[k];
      obj[idx.at({VarKind::esag_p, k, -1, t, -1})] = e.price_energy[t];
      obj[idx.at({VarKind::esag_r_up, k, -1, t, -1})] =
          e.reg.cap_up[t] + pr.s_up[t] * pr.mu_up[t] * e.reg.mil_up[t];
      obj[idx.at({VarKind::esag_r_dn, k, -1, t, -1})] =
          e.reg.cap_dn[t] + pr.s_dn[t] * pr.mu_dn[t] * e.reg.mil_dn[t];
    }
    for (int k = 0; k < static_cast<int>(inst.evcss.size()); ++k) {
      const EvcsSpec& e = inst.evcss[k];
      obj[idx.at({VarKind::evcs_p, k, -1, t, -1})] = -e.price_energy[t];
      obj[idx.at({VarKind::evcs_r_up, k, -1, t, -1})] =
          e.reg.cap_up[t] + pr.s_up[t] * pr.mu_up[t] * e.reg.mil_up[t];
      obj[idx.at({VarKind::evcs_r_dn, k, -1, t, -1})] =
          e.reg.cap_dn[t] + pr.s_dn[t] * pr.mu_dn[t] * e.reg.mil_dn[t];
    }
    for (int k = 0; k < static_cast<int>(inst.ddgags.size()); ++k) {
      const DdgagSpec& d = inst.ddgags[k];
      obj[idx.at({VarKind::ddg_p, k, -1, t, -1})] = d.price_energy[t];
      obj[idx.at({VarKind::ddg_r_up, k, -1, t, -1})] =
          d.reg.cap_up[t] + pr.s_up[t] * pr.mu_up[t] * d.reg.mil_up[t];
      obj[idx.at({VarKind::ddg_r_dn, k, -1, t, -1})] =
          d.reg.cap_dn[t] + pr.s_dn[t] * pr.mu_dn[t] * d.reg.mil_dn[t];
    }
  }
  for (int w = 0; w < scen.count(); ++w) {
    const Scenario& s = scen.scenarios[w];
    for (int t = 0; t < T; ++t) {
      obj[idx.at({VarKind::rt_buy, -1, -1, t, w})] = s.probability * s.rt_buy[t];
      obj[idx.at({VarKind::rt_sell, -1, -1, t, w})] = -s.probability * s.rt_sell[t];
    }
  }
  return obj;
}

void add_drag_block(ModelBuilder& b) {
  const Instance& inst = b.inst();
  const int T = inst.horizon.count();
  for (int t = 0; t < T; ++t) {
    for (int k = 0; k < static_cast<int>(inst.drags.size()); ++k) {
      const DragSpec& d = inst.drags[k];
      double total_max = 0.0;
      for (const DragBlock& blk : d.blocks) total_max += blk.p_max;

      const int floor_row = b.add_row(RowFamily::drag_floor, k, t, -1, '>', 0.0);
      const int ceil_row =
          b.add_row(RowFamily::drag_ceiling, k, t, -1, '<', total_max);
      for (int a = 0; a < static_cast<int>(d.blocks.size()); ++a) {
        const int col = b.idx().at({VarKind::drag_block_p, k, a, t, -1});
        b.coeff(floor_row, col, 1.0);
        b.coeff(ceil_row, col, 1.0);
      }
      b.coeff(floor_row, b.idx().at({VarKind::drag_r_dn, k, -1, t, -1}), -1.0);
      b.coeff(ceil_row, b.idx().at({VarKind::drag_r_up, k, -1, t, -1}), 1.0);
    }
  }
}

void add_esag_block(ModelBuilder& b) {
  const Instance& inst = b.inst();
  const PriceData& pr = inst.prices;
  const int T = inst.horizon.count();
  for (int t = 0; t < T; ++t) {
    for (int k = 0; k < static_cast<int>(inst.esags.size()); ++k) {
      const EsagSpec& e = inst.esags[k];
      const auto col = [&](VarKind kind) {
        return b.idx().at({kind, k, -1, t, -1});
      };

      // charge-level balance; the previous-hour level is data at t = 0
      const int energy = b.add_row(RowFamily::esag_energy, k, t, -1, '=',
                                   t == 0 ? e.e_init : 0.0);
      b.coeff(energy, col(VarKind::esag_p), 1.0);
      b.coeff(energy, col(VarKind::esag_e), 1.0);
      if (t > 0)
        b.coeff(energy, b.idx().at({VarKind::esag_e, k, -1, t - 1, -1}), -1.0);
      b.coeff(energy, col(VarKind::esag_r_up), -pr.mu_up[t] / e.eta_di);
      b.coeff(energy, col(VarKind::esag_r_dn), e.eta_ch * pr.mu_dn[t]);

      const int split = b.add_row(RowFamily::esag_split, k, t, -1, '=', 0.0);
      b.coeff(split, col(VarKind::esag_p), 1.0);
      b.coeff(split, col(VarKind::esag_p_di), -1.0 / e.eta_di);
      b.coeff(split, col(VarKind::esag_p_ch), e.eta_ch);

      const int up_mix = b.add_row(RowFamily::esag_up_mix, k, t, -1, '=', 0.0);
      b.coeff(up_mix, col(VarKind::esag_r_up), 1.0);
      b.coeff(up_mix, col(VarKind::esag_r_up_di), -1.0);
      b.coeff(up_mix, col(VarKind::esag_r_dn_ch), -1.0);

      const int dn_mix = b.add_row(RowFamily::esag_dn_mix, k, t, -1, '=', 0.0);
      b.coeff(dn_mix, col(VarKind::esag_r_dn), 1.0);
      b.coeff(dn_mix, col(VarKind::esag_r_dn_di), -1.0);
      b.coeff(dn_mix, col(VarKind::esag_r_up_ch), -1.0);

      const int mode = col(VarKind::esag_mode);
      const auto gate = [&](RowFamily fam, VarKind kind, double cap,
                            bool charging) {
        // discharge side: v <= cap*b ; charge side: v <= cap*(1-b)
        const int row = b.add_row(fam, k, t, -1, '<', charging ? cap : 0.0);
        b.coeff(row, col(kind), 1.0);
        b.coeff(row, mode, charging ? cap : -cap);
      };
      gate(RowFamily::esag_di_gate, VarKind::esag_p_di, e.dr_max, false);
      gate(RowFamily::esag_up_di_gate, VarKind::esag_r_up_di, e.dr_max, false);
      gate(RowFamily::esag_dn_di_gate, VarKind::esag_r_dn_di, e.dr_max, false);
      gate(RowFamily::esag_ch_gate, VarKind::esag_p_ch, e.cr_max, true);
      gate(RowFamily::esag_up_ch_gate, VarKind::esag_r_up_ch, e.cr_max, true);
      gate(RowFamily::esag_dn_ch_gate, VarKind::esag_r_dn_ch, e.cr_max, true);

      const int di_floor = b.add_row(RowFamily::esag_di_floor, k, t, -1, '>', 0.0);
      b.coeff(di_floor, col(VarKind::esag_p_di), 1.0);
      b.coeff(di_floor, col(VarKind::esag_r_dn_di), -1.0);
      const int di_ceil =
          b.add_row(RowFamily::esag_di_ceiling, k, t, -1, '<', e.dr_max);
      b.coeff(di_ceil, col(VarKind::esag_p_di), 1.0);
      b.coeff(di_ceil, col(VarKind::esag_r_up_di), 1.0);

      const int ch_floor = b.add_row(RowFamily::esag_ch_floor, k, t, -1, '>', 0.0);
      b.coeff(ch_floor, col(VarKind::esag_p_ch), 1.0);
      b.coeff(ch_floor, col(VarKind::esag_r_dn_ch), -1.0);
      const int ch_ceil =
          b.add_row(RowFamily::esag_ch_ceiling, k, t, -1, '<', e.cr_max);
      b.coeff(ch_ceil, col(VarKind::esag_p_ch), 1.0);
      b.coeff(ch_ceil, col(VarKind::esag_r_up_ch), 1.0);

      // binary-scaled packing: with fractional b the plain gates let both
      // modes market regulation at once, doubling the sellable capacity and
      // leaving a relaxation gap branch-and-bound cannot close at this
      // scale. Equal to the headroom rows at integer b.
      const int di_pack = b.add_row(RowFamily::esag_di_pack, k, t, -1, '<', 0.0);
      b.coeff(di_pack, col(VarKind::esag_p_di), 1.0);
      b.coeff(di_pack, col(VarKind::esag_r_up_di), 1.0);
      b.coeff(di_pack, mode, -e.dr_max);
      const int ch_pack =
          b.add_row(RowFamily::esag_ch_pack, k, t, -1, '<', e.cr_max);
      b.coeff(ch_pack, col(VarKind::esag_p_ch), 1.0);
      b.coeff(ch_pack, col(VarKind::esag_r_up_ch), 1.0);
      b.coeff(ch_pack, mode, e.cr_max);
    }
  }
}

void add_evcs_block(ModelBuilder& b) {
  const Instance& inst = b.inst();
  const PriceData& pr = inst.prices;
  for (int k = 0; k < static_cast<int>(inst.evcss.size()); ++k) {
    const EvcsSpec& e = inst.evcss[k];
    const int on = b.idx().at({VarKind::evcs_on, k, -1, -1, -1});

    std::vector<int> wpos;
    for (int hour : e.window) {
      const int t = inst.horizon.position_of(hour);
      if (t >= 0) wpos.push_back(t);
    }

    for (int t : wpos) {
      const auto col = [&](VarKind kind) {
        return b.idx().at({kind, k, -1, t, -1});
      };
      int row = b.add_row(RowFamily::evcs_p_gate, k, t, -1, '<', 0.0);
      b.coeff(row, col(VarKind::evcs_p), 1.0);
      b.coeff(row, on, -e.er_max);
      row = b.add_row(RowFamily::evcs_up_gate, k, t, -1, '<', 0.0);
      b.coeff(row, col(VarKind::evcs_r_up), 1.0);
      b.coeff(row, on, -e.err_max);
      row = b.add_row(RowFamily::evcs_dn_gate, k, t, -1, '<', 0.0);
      b.coeff(row, col(VarKind::evcs_r_dn), 1.0);
      b.coeff(row, on, -e.err_max);
      row = b.add_row(RowFamily::evcs_headroom, k, t, -1, '<', e.er_max);
      b.coeff(row, col(VarKind::evcs_p), 1.0);
      b.coeff(row, col(VarKind::evcs_r_up), 1.0);
      row = b.add_row(RowFamily::evcs_floor, k, t, -1, '>', 0.0);
      b.coeff(row, col(VarKind::evcs_p), 1.0);
      b.coeff(row, col(VarKind::evcs_r_dn), -1.0);
    }

    // terminal charge window: initial level plus deployed charging energy,
    // active only when committed. With the strict reading the charging
    // efficiency multiplies the summed charging term only.
    const double gse = inst.flags.evcs_eq23_strict ? 1.0 : e.gamma_ch;
    const int lo = b.add_row(RowFamily::evcs_target_lo, k, -1, -1, '>', 0.0);
    const int hi = b.add_row(RowFamily::evcs_target_hi, k, -1, -1, '<', 0.0);
    b.coeff(lo, on, gse * e.e_init - 0.9 * e.cl_max);
    b.coeff(hi, on, gse * e.e_init - e.cl_max);
    for (int t : wpos) {
      const auto col = [&](VarKind kind) {
        return b.idx().at({kind, k, -1, t, -1});
      };
      const double g = e.gamma_ch;
      b.coeff(lo, col(VarKind::evcs_p), g);
      b.coeff(hi, col(VarKind::evcs_p), g);
      b.coeff(lo, col(VarKind::evcs_r_up), g * pr.mu_up[t]);
      b.coeff(hi, col(VarKind::evcs_r_up), g * pr.mu_up[t]);
      b.coeff(lo, col(VarKind::evcs_r_dn), -g * pr.mu_dn[t]);
      b.coeff(hi, col(VarKind::evcs_r_dn), -g * pr.mu_dn[t]);
    }
  }
}

void add_ddgag_block(ModelBuilder& b) {
  const Instance& inst = b.inst();
  const int T = inst.horizon.count();
  for (int t = 0; t < T; ++t) {
    for (int k = 0; k < static_cast<int>(inst.ddgags.size()); ++k) {
      const DdgagSpec& d = inst.ddgags[k];
      const int ceil_row =
          b.add_row(RowFamily::ddg_ceiling, k, t, -1, '<', d.p_max);
      b.coeff(ceil_row, b.idx().at({VarKind::ddg_p, k, -1, t, -1}), 1.0);
      b.coeff(ceil_row, b.idx().at({VarKind::ddg_r_up, k, -1, t, -1}), 1.0);
      const int floor_row =
          b.add_row(RowFamily::ddg_floor, k, t, -1, '>', d.p_min);
      b.coeff(floor_row, b.idx().at({VarKind::ddg_p, k, -1, t, -1}), 1.0);
      b.coeff(floor_row, b.idx().at({VarKind::ddg_r_dn, k, -1, t, -1}), -1.0);
    }
  }
}

void add_day_ahead_network(ModelBuilder& b) {
  const Instance& inst = b.inst();
  const Network& net = inst.network;
  const int T = inst.horizon.count();
  const int nb = net.bus_count();
  const int nj = net.branch_count();
  const int sub_pos = net.bus_position(net.substation_bus);

  for (int t = 0; t < T; ++t) {
    // nodal balances, written injection-positive so the dual prices load
    for (int n = 0; n < nb; ++n) {
      const int bp = b.add_row(RowFamily::balance_p, n, t, -1, '=',
                               inst.loads.p(t, n));
      const int bq = b.add_row(RowFamily::balance_q, n, t, -1, '=',
                               inst.loads.q(t, n));
      if (n == sub_pos) {
        b.coeff(bp, b.idx().at({VarKind::sub_p, -1, -1, t, -1}), 1.0);
        b.coeff(bq, b.idx().at({VarKind::sub_q, -1, -1, t, -1}), 1.0);
      }
      for (int k = 0; k < static_cast<int>(inst.esags.size()); ++k)
        if (net.bus_position(inst.esags[k].bus) == n)
          b.coeff(bp, b.idx().at({VarKind::esag_p, k, -1, t, -1}), 1.0);
      for (int k = 0; k < static_cast<int>(inst.ddgags.size()); ++k)
        if (net.bus_position(inst.ddgags[k].bus) == n) {
          b.coeff(bp, b.idx().at({VarKind::ddg_p, k, -1, t, -1}), 1.0);
          b.coeff(bq, b.idx().at({VarKind::ddg_p, k, -1, t, -1}),
                  inst.ddgags[k].tan_phi);
        }
      for (int k = 0; k < static_cast<int>(inst.reags.size()); ++k)
        if (net.bus_position(inst.reags[k].bus) == n)
          b.coeff(bp, b.idx().at({VarKind::reag_p, k, -1, t, -1}), 1.0);
      for (int k = 0; k < static_cast<int>(inst.drags.size()); ++k)
        if (net.bus_position(inst.drags[k].bus) == n)
          for (int a = 0; a < static_cast<int>(inst.drags[k].blocks.size()); ++a) {
            b.coeff(bp, b.idx().at({VarKind::drag_block_p, k, a, t, -1}), -1.0);
            b.coeff(bq, b.idx().at({VarKind::drag_block_p, k, a, t, -1}),
                    -inst.drags[k].tan_phi);
          }
      for (int k = 0; k < static_cast<int>(inst.evcss.size()); ++k)
        if (net.bus_position(inst.evcss[k].bus) == n)
          b.coeff(bp, b.idx().at({VarKind::evcs_p, k, -1, t, -1}), -1.0);
      for (int j = 0; j < nj; ++j) {
        const int inc = net.incidence(j, n);
        if (inc != 0) {
          b.coeff(bp, b.idx().at({VarKind::flow_p, j, -1, t, -1}), -inc);
          b.coeff(bq, b.idx().at({VarKind::flow_q, j, -1, t, -1}), -inc);
        }
      }
    }

    for (int j = 0; j < nj; ++j) {
      const Branch& br = net.branches[j];
      const int from = net.bus_position(br.from_bus);
      const int to = net.bus_position(br.to_bus);
      const int row = b.add_row(RowFamily::volt_drop, j, t, -1, '=', 0.0);
      b.coeff(row, b.idx().at({VarKind::volt, to, -1, t, -1}), 1.0);
      b.coeff(row, b.idx().at({VarKind::volt, from, -1, t, -1}), -1.0);
      b.coeff(row, b.idx().at({VarKind::flow_p, j, -1, t, -1}),
              br.r / net.s_base_mva);
      b.coeff(row, b.idx().at({VarKind::flow_q, j, -1, t, -1}),
              br.x / net.s_base_mva);
    }

    // wholesale regulation offers; demand-side capacity-down counts toward
    // system regulation-up and vice versa
    const int up = b.add_row(RowFamily::agg_up, -1, t, -1, '=', 0.0);
    const int dn = b.add_row(RowFamily::agg_dn, -1, t, -1, '=', 0.0);
    b.coeff(up, b.idx().at({VarKind::sub_r_up, -1, -1, t, -1}), 1.0);
    b.coeff(dn, b.idx().at({VarKind::sub_r_dn, -1, -1, t, -1}), 1.0);
    for (int k = 0; k < static_cast<int>(inst.esags.size()); ++k) {
      b.coeff(up, b.idx().at({VarKind::esag_r_up, k, -1, t, -1}), -1.0);
      b.coeff(dn, b.idx().at({VarKind::esag_r_dn, k, -1, t, -1}), -1.0);
    }
    for (int k = 0; k < static_cast<int>(inst.ddgags.size()); ++k) {
      b.coeff(up, b.idx().at({VarKind::ddg_r_up, k, -1, t, -1}), -1.0);
      b.coeff(dn, b.idx().at({VarKind::ddg_r_dn, k, -1, t, -1}), -1.0);
    }
    for (int k = 0; k < static_cast<int>(inst.drags.size()); ++k) {
      b.coeff(up, b.idx().at({VarKind::drag_r_dn, k, -1, t, -1}), -1.0);
      b.coeff(dn, b.idx().at({VarKind::drag_r_up, k, -1, t, -1}), -1.0);
    }
    for (int k = 0; k < static_cast<int>(inst.evcss.size()); ++k) {
      b.coeff(up, b.idx().at({VarKind::evcs_r_dn, k, -1, t, -1}), -1.0);
      b.coeff(dn, b.idx().at({VarKind::evcs_r_up, k, -1, t, -1}), -1.0);
    }
  }
}

void add_real_time_network(ModelBuilder& b, int w) {
  const Instance& inst = b.inst();
  const Network& net = inst.network;
  const Scenario& sc = b.scen().scenarios[w];
  const int T = inst.horizon.count();
  const int nb = net.bus_count();
  const int nj = net.branch_count();
  const int sub_pos = net.bus_position(net.substation_bus);

  for (int t = 0; t < T; ++t) {
    for (int n = 0; n < nb; ++n) {
      double rhs_p = sc.load_p(t, n) - inst.loads.p(t, n);
      for (int k = 0; k < static_cast<int>(inst.reags.size()); ++k)
        if (net.bus_position(inst.reags[k].bus) == n) rhs_p -= sc.reag_cap(t, k);
      const int ap = b.add_row(RowFamily::adj_p, n, t, w, '=', rhs_p);
      const int aq = b.add_row(RowFamily::adj_q, n, t, w, '=',
                               sc.load_q(t, n) - inst.loads.q(t, n));
      if (n == sub_pos) {
        b.coeff(ap, b.idx().at({VarKind::rt_buy, -1, -1, t, w}), 1.0);
        b.coeff(ap, b.idx().at({VarKind::rt_sell, -1, -1, t, w}), -1.0);
        b.coeff(aq, b.idx().at({VarKind::rt_sub_q, -1, -1, t, w}), 1.0);
      }
      for (int k = 0; k < static_cast<int>(inst.reags.size()); ++k)
        if (net.bus_position(inst.reags[k].bus) == n) {
          b.coeff(ap, b.idx().at({VarKind::reag_p, k, -1, t, -1}), -1.0);
          b.coeff(ap, b.idx().at({VarKind::reag_spill, k, -1, t, w}), -1.0);
        }
      for (int j = 0; j < nj; ++j) {
        const int inc = net.incidence(j, n);
        if (inc != 0) {
          b.coeff(ap, b.idx().at({VarKind::rt_flow_p, j, -1, t, w}), -inc);
          b.coeff(ap, b.idx().at({VarKind::flow_p, j, -1, t, -1}), inc);
          b.coeff(aq, b.idx().at({VarKind::rt_flow_q, j, -1, t, w}), -inc);
          b.coeff(aq, b.idx().at({VarKind::flow_q, j, -1, t, -1}), inc);
        }
      }
    }

    for (int j = 0; j < nj; ++j) {
      const Branch& br = net.branches[j];
      const int from = net.bus_position(br.from_bus);
      const int to = net.bus_position(br.to_bus);
      const int row = b.add_row(RowFamily::volt_adj, j, t, w, '=', 0.0);
      b.coeff(row, b.idx().at({VarKind::rt_volt, to, -1, t, w}), 1.0);
      b.coeff(row, b.idx().at({VarKind::volt, to, -1, t, -1}), -1.0);
      b.coeff(row, b.idx().at({VarKind::rt_volt, from, -1, t, w}), -1.0);
      b.coeff(row, b.idx().at({VarKind::volt, from, -1, t, -1}), 1.0);
      b.coeff(row, b.idx().at({VarKind::rt_flow_p, j, -1, t, w}),
              br.r / net.s_base_mva);
      b.coeff(row, b.idx().at({VarKind::flow_p, j, -1, t, -1}),
              -br.r / net.s_base_mva);
      b.coeff(row, b.idx().at({VarKind::rt_flow_q, j, -1, t, w}),
              br.x / net.s_base_mva);
      b.coeff(row, b.idx().at({VarKind::flow_q, j, -1, t, -1}),
              -br.x / net.s_base_mva);
    }
  }
}

void add_reag_block(const Instance& inst, const ScenarioSet& scen,
                    const VariableIndex& idx, VectorXd& lo, VectorXd& hi) {
  const int T = inst.horizon.count();
  for (int k = 0; k < static_cast<int>(inst.reags.size()); ++k) {
    for (int t = 0; t < T; ++t) {
      const int col = idx.at({VarKind::reag_p, k, -1, t, -1});
      lo[col] = 0.0;
      hi[col] = inst.reags[k].p_forecast_max[t];
      for (int w = 0; w < scen.count(); ++w) {
        const int sp = idx.at({VarKind::reag_spill, k, -1, t, w});
        lo[sp] = 0.0;
        hi[sp] = scen.scenarios[w].reag_cap(t, k);
      }
    }
  }
}

void set_column_bounds(const Instance& inst, const ScenarioSet& scen,
                       const VariableIndex& idx, VectorXd& lo, VectorXd& hi) {
  const Network& net = inst.network;
  const int sub_pos = net.bus_position(net.substation_bus);
  for (int c = 0; c < idx.count(); ++c) {
    const VarKey& key = idx.key(c);
    double l = 0.0, h = kInf;
    switch (key.kind) {
      case VarKind::sub_p:
      case VarKind::sub_q:
      case VarKind::rt_sub_q:
        l = -kInf;
        break;
      case VarKind::sub_r_up:
      case VarKind::sub_r_dn:
        break;
      case VarKind::drag_block_p:
        h = inst.drags[key.owner].blocks[key.sub].p_max;
        break;
      case VarKind::drag_r_up:
        h = inst.drags[key.owner].r_up_max;
        break;
      case VarKind::drag_r_dn:
        h = inst.drags[key.owner].r_dn_max;
        break;
      case VarKind::esag_e:
        l = inst.esags[key.owner].e_min;
        h = inst.esags[key.owner].e_max;
        break;
      case VarKind::esag_p:
        l = -kInf;
        break;
      case VarKind::esag_p_di:
      case VarKind::esag_r_up_di:
      case VarKind::esag_r_dn_di:
        h = inst.esags[key.owner].dr_max;
        break;
      case VarKind::esag_p_ch:
      case VarKind::esag_r_up_ch:
      case VarKind::esag_r_dn_ch:
        h = inst.esags[key.owner].cr_max;
        break;
      case VarKind::esag_r_up:
      case VarKind::esag_r_dn:
        h = inst.esags[key.owner].dr_max + inst.esags[key.owner].cr_max;
        break;
      case VarKind::esag_mode:
      case VarKind::evcs_on:
        h = 1.0;
        break;
      case VarKind::evcs_p: {
        const EvcsSpec& e = inst.evcss[key.owner];
        const bool in_window =
            std::find(e.window.begin(), e.window.end(),
                      inst.horizon.hours[key.t]) != e.window.end();
        h = in_window ? e.er_max : 0.0;
        break;
      }
      case VarKind::evcs_r_up:
      case VarKind::evcs_r_dn: {
        const EvcsSpec& e = inst.evcss[key.owner];
        const bool in_window =
            std::find(e.window.begin(), e.window.end(),
                      inst.horizon.hours[key.t]) != e.window.end();
        h = in_window ? e.err_max : 0.0;
        break;
      }
      case VarKind::ddg_p:
        l = inst.ddgags[key.owner].p_min;
        h = inst.ddgags[key.owner].p_max;
        break;
      case VarKind::ddg_r_up:
        h = inst.ddgags[key.owner].ru;
        break;
      case VarKind::ddg_r_dn:
        h = inst.ddgags[key.owner].rd;
        break;
      case VarKind::reag_p:
      case VarKind::reag_spill:
        continue;  // set by add_reag_block
      case VarKind::flow_p:
      case VarKind::rt_flow_p:
        h = net.branch_pl_max(key.owner);
        l = -h;
        break;
      case VarKind::flow_q:
      case VarKind::rt_flow_q:
        h = net.branch_ql_max(key.owner);
        l = -h;
        break;
      case VarKind::volt:
      case VarKind::rt_volt:
        // the substation bus holds the voltage reference
        if (key.owner == sub_pos) {
          l = 1.0;
          h = 1.0;
        } else {
          l = net.v_min;
          h = net.v_max;
        }
        break;
      case VarKind::rt_buy:
        break;
      case VarKind::rt_sell:
        if (!inst.flags.rt_sell_allowed) h = 0.0;
        break;
    }
    lo[c] = l;
    hi[c] = h;
  }
  (void)scen;
}

Model assemble(const Instance& inst, const ScenarioSet& scen) {
  Model m;
  m.instance = inst;
  m.index = index_variables(inst, scen);
  const int ncols = m.index.count();

  ModelBuilder b(inst, scen, m.index);
  add_drag_block(b);
  add_esag_block(b);
  add_evcs_block(b);
  add_ddgag_block(b);
  add_day_ahead_network(b);
  for (int w = 0; w < scen.count(); ++w) add_real_time_network(b, w);

  const int nrows = b.rows();
  m.lp.A.resize(nrows, ncols);
  m.lp.A.setFromTriplets(b.trips_.begin(), b.trips_.end());
  m.lp.A.makeCompressed();
  m.lp.rhs = Eigen::Map<const VectorXd>(b.rhs_.data(), nrows);
  m.lp.sense = b.sense_;
  m.lp.lo.resize(ncols);
  m.lp.hi.resize(ncols);
  set_column_bounds(inst, scen, m.index, m.lp.lo, m.lp.hi);
  add_reag_block(inst, scen, m.index, m.lp.lo, m.lp.hi);
  m.lp.obj = build_objective(inst, scen, m.index);

  m.integer_cols.assign(ncols, 0);
  for (int c = 0; c < ncols; ++c) {
    const VarKind k = m.index.key(c).kind;
    if (k == VarKind::esag_mode || k == VarKind::evcs_on) m.integer_cols[c] = 1;
  }

  m.row_tags = b.tags_;
  for (int r = 0; r < nrows; ++r) {
    auto [it, inserted] = m.tag_to_row.emplace(m.row_tags[r], r);
    if (!inserted) throw std::logic_error("duplicate row tag");
  }
  return m;
}

int Model::row_of(const RowTag& tag) const {
  auto it = tag_to_row.find(tag);
  if (it == tag_to_row.end()) throw std::logic_error("unknown row tag");
  return it->second;
}

std::vector<int> Model::binary_columns() const {
  std::vector<int> out;
  for (int c = 0; c < static_cast<int>(integer_cols.size()); ++c)
    if (integer_cols[c]) out.push_back(c);
  return out;
}

std::string Model::column_name(int col) const {
  const VarKey& k = index.key(col);
  std::ostringstream os;
  os << to_string(k.kind);
  if (k.owner >= 0) os << "_" << k.owner;
  if (k.sub >= 0) os << "b" << k.sub;
  if (k.t >= 0) os << "_t" << k.t;
  if (k.w >= 0) os << "_w" << k.w;
  return os.str();
}

std::string Model::row_name(int row) const {
  const RowTag& tag = row_tags[row];
  std::ostringstream os;
  os << to_string(tag.family);
  if (tag.owner >= 0) os << "_" << tag.owner;
  if (tag.t >= 0) os << "_t" << tag.t;
  if (tag.w >= 0) os << "_w" << tag.w;
  return os.str();
}

}  // namespace dsom

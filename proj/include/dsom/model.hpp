#pragma once

#include <map>
#include <string>
#include <vector>

#include "dsom/lp.hpp"
#include "dsom/types.hpp"

namespace dsom {

// Decision variable kinds. First-stage kinds are laid out hour-major, the
// per-station EVCS commitment binaries follow, and second-stage kinds are
// scenario-major. Owners are positions into the instance's aggregator /
// branch / bus lists.
enum class VarKind : int {
  sub_p, sub_q, sub_r_up, sub_r_dn,
  drag_block_p, drag_r_up, drag_r_dn,
  esag_e, esag_p, esag_p_ch, esag_p_di,
  esag_r_up, esag_r_dn, esag_r_up_di, esag_r_dn_di, esag_r_up_ch, esag_r_dn_ch,
  esag_mode,
  evcs_p, evcs_r_up, evcs_r_dn, evcs_on,
  ddg_p, ddg_r_up, ddg_r_dn,
  reag_p,
  flow_p, flow_q, volt,
  rt_buy, rt_sell, rt_sub_q, reag_spill, rt_flow_p, rt_flow_q, rt_volt,
};

const char* to_string(VarKind k);

struct VarKey {
  VarKind kind{};
  int owner = -1;  // aggregator / branch / bus position; -1 system-wide
  int sub = -1;    // demand block index
  int t = -1;      // hour position; -1 for per-station columns
  int w = -1;      // scenario position; -1 first stage

  friend auto operator<=>(const VarKey&, const VarKey&) = default;
};

// Constraint row families, named by what each row enforces.
enum class RowFamily : int {
  drag_floor,        // total block consumption covers the capacity-down offer
  drag_ceiling,      // consumption plus capacity-up within block capacity
  esag_energy,       // charge-level balance incl. deployed regulation energy
  esag_split,        // net injection split into charge/discharge parts
  esag_up_mix,       // capacity-up = discharge-up + charge-down parts
  esag_dn_mix,       // capacity-down = discharge-down + charge-up parts
  esag_di_gate, esag_up_di_gate, esag_dn_di_gate,   // discharge-mode binary gates
  esag_ch_gate, esag_up_ch_gate, esag_dn_ch_gate,   // charge-mode binary gates
  esag_di_floor, esag_di_ceiling,  // discharge headroom
  esag_ch_floor, esag_ch_ceiling,  // charge headroom
  esag_di_pack, esag_ch_pack,      // binary-scaled mode packing (relaxation
                                   // tightening; exact at integer points)
  evcs_p_gate, evcs_up_gate, evcs_dn_gate,  // commitment binary gates
  evcs_headroom,     // charging plus capacity-up within the charger rating
  evcs_floor,        // charging covers the capacity-down offer
  evcs_target_lo, evcs_target_hi,  // terminal charge window when committed
  ddg_ceiling, ddg_floor,
  balance_p,         // day-ahead nodal active balance (day-ahead LMP source)
  balance_q,         // day-ahead nodal reactive balance
  volt_drop,
  agg_up, agg_dn,    // aggregated wholesale regulation offers
  adj_p,             // real-time nodal active adjustment (real-time LMP source)
  adj_q,
  volt_adj,
};

const char* to_string(RowFamily f);

struct RowTag {
  RowFamily family{};
  int owner = -1;  // bus / branch / aggregator position, family dependent
  int t = -1;
  int w = -1;

  friend auto operator<=>(const RowTag&, const RowTag&) = default;
};

// Deterministic bijection (kind, owner, sub, t, w) <-> dense column id.
class VariableIndex {
 public:
  int add(const VarKey& key);
  int at(const VarKey& key) const;           // throws on unknown key
  int find(const VarKey& key) const;         // -1 when absent
  const VarKey& key(int col) const { return keys_[col]; }
  int count() const { return static_cast<int>(keys_.size()); }
  const std::vector<VarKey>& keys() const { return keys_; }

 private:
  std::vector<VarKey> keys_;
  std::map<VarKey, int> lookup_;
};

VariableIndex index_variables(const Instance& inst, const ScenarioSet& scen);

// Sparse MILP with every row tagged for dual retrieval. Keeps a copy of the
// instance it was built from so settlement and audits can reach parameters.
struct Model {
  BoundedLp lp;
  std::vector<uint8_t> integer_cols;  // 0/1 flag per column
  VariableIndex index;
  std::vector<RowTag> row_tags;
  std::map<RowTag, int> tag_to_row;
  Instance instance;

  int row_of(const RowTag& tag) const;  // throws on unknown tag
  std::vector<int> binary_columns() const;
  std::string column_name(int col) const;
  std::string row_name(int row) const;
};

// Incremental row assembly used by the per-family builders.
class ModelBuilder {
 public:
  ModelBuilder(const Instance& inst, const ScenarioSet& scen,
               const VariableIndex& idx)
      : inst_(inst), scen_(scen), idx_(idx) {}

  int add_row(RowFamily family, int owner, int t, int w, char sense, double rhs);
  void coeff(int row, int col, double value);

  const Instance& inst() const { return inst_; }
  const ScenarioSet& scen() const { return scen_; }
  const VariableIndex& idx() const { return idx_; }
  int rows() const { return static_cast<int>(rhs_.size()); }

  friend Model assemble(const Instance&, const ScenarioSet&);

 private:
  const Instance& inst_;
  const ScenarioSet& scen_;
  const VariableIndex& idx_;
  std::vector<Eigen::Triplet<double>> trips_;
  std::vector<double> rhs_;
  std::vector<char> sense_;
  std::vector<RowTag> tags_;
};

// Objective coefficients (minimize).
VectorXd build_objective(const Instance& inst, const ScenarioSet& scen,
                         const VariableIndex& idx);

// Row builders, one per constraint group.
void add_drag_block(ModelBuilder& b);
void add_esag_block(ModelBuilder& b);
void add_evcs_block(ModelBuilder& b);
void add_ddgag_block(ModelBuilder& b);
void add_day_ahead_network(ModelBuilder& b);
void add_real_time_network(ModelBuilder& b, int w);

// REAG columns carry no rows: day-ahead schedule capped by the forecast,
// per-scenario spill capped by the realization. Pure bound assignment.
void add_reag_block(const Instance& inst, const ScenarioSet& scen,
                    const VariableIndex& idx, VectorXd& lo, VectorXd& hi);

// Bounds for every other column kind.
void set_column_bounds(const Instance& inst, const ScenarioSet& scen,
                       const VariableIndex& idx, VectorXd& lo, VectorXd& hi);

Model assemble(const Instance& inst, const ScenarioSet& scen);

}  // namespace dsom

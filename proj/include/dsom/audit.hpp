#pragma once

#include <string>
#include <vector>

#include "dsom/model.hpp"
#include "dsom/types.hpp"

namespace dsom {

// Physical consistency of a solved schedule, recomputed from instance data
// and the primal values only (deliberately not reusing the model rows).
struct PhysicsReport {
  double max_active_balance = 0.0;    // day-ahead nodal active residual, MW
  double max_reactive_balance = 0.0;
  double max_rt_active_balance = 0.0;
  double max_rt_reactive_balance = 0.0;
  double max_storage_residual = 0.0;  // charge-level recursion residual, MWh
  double max_storage_bound = 0.0;     // excursion beyond [e_min, e_max]
  double max_mode_overlap = 0.0;      // max_t p_ch * p_di
  double max_agg_identity = 0.0;      // wholesale regulation aggregation rows
  double max_evcs_target = 0.0;       // excursion outside the terminal window
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
};

PhysicsReport audit_solution(const Model& model, const ScenarioSet& scen,
                             const VectorXd& x, double tol = 1e-6);

}  // namespace dsom

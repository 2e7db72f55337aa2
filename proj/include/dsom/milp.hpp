#pragma once

#include <string>
#include <vector>

#include "dsom/lp.hpp"
#include "dsom/model.hpp"

namespace dsom {

enum class MilpStatus { optimal, infeasible, unbounded, node_limit, breakdown };

const char* to_string(MilpStatus s);

struct MilpOptions {
  double int_tol = 1e-6;
  double abs_gap = 1e-6;
  long max_nodes = 100000;
  LpOptions lp;
  // rhs shift applied to the nodal balance rows of the pricing re-solve so
  // degenerate duals land on the marginal cost of serving additional load
  double pricing_load_shift = 1e-3;
};

struct MilpSolution {
  MilpStatus status = MilpStatus::breakdown;
  Eigen::VectorXd x;
  double objective = 0.0;
  std::vector<double> binary_values;  // aligned with Model::binary_columns()
  long node_count = 0;
  long lp_iterations = 0;
  LpSolution pricing;  // fixed-binary LP, source of all duals
  std::string infeasible_hint;
};

// Best-first branch and bound on the model's binaries: branches on the most
// fractional binary (ties to the lowest column id), prunes against the
// incumbent at an absolute gap, then re-solves with binaries fixed to price
// the final schedule.
MilpSolution solve_milp(const Model& model, const MilpOptions& opts = {});

// LP with all binaries pinned to `assignment`, returning duals for every
// tagged row. The primal/objective come from the exact LP; the duals come
// from a warm re-solve with all nodal loads shifted up by a hair, which picks
// the load-marginal member of the optimal dual face (both are exact optima
// of the unperturbed LP).
LpSolution fix_and_price(const Model& model, const std::vector<double>& assignment,
                         const MilpOptions& opts = {});

// Exhaustive assignment enumeration; the test oracle for solve_milp.
// Refuses more than 20 binaries.
MilpSolution brute_force_milp(const Model& model, const MilpOptions& opts = {});

}  // namespace dsom

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace dsom {

// Bounded-variable LP in row form: rows are `a'x (sense) rhs` with
// sense in {'<','=','>'}, columns carry [lo, hi] bounds (infinities allowed).
// Objective sense is minimize. Row order is preserved through the solve so
// callers can map duals back by row index.
struct BoundedLp {
  Eigen::SparseMatrix<double> A;  // m x n, column-major
  Eigen::VectorXd rhs;
  std::vector<char> sense;
  Eigen::VectorXd lo, hi;
  Eigen::VectorXd obj;

  int rows() const { return static_cast<int>(A.rows()); }
  int cols() const { return static_cast<int>(A.cols()); }
};

enum class LpStatus { optimal, infeasible, unbounded, breakdown, iteration_limit };

const char* to_string(LpStatus s);

enum class VarStatus : std::uint8_t { basic, at_lower, at_upper, nonbasic_free };

// Simplex basis snapshot; usable to warm start a structurally identical LP
// (same rows/columns, possibly different bounds, costs or rhs).
struct Basis {
  std::vector<int> basic;              // column index per row position
  std::vector<VarStatus> status;       // over n structural + m logical columns
  bool empty() const { return basic.empty(); }
};

struct LpSolution {
  LpStatus status = LpStatus::breakdown;
  Eigen::VectorXd x;             // structural values
  double objective = 0.0;
  Eigen::VectorXd row_dual;      // one per row; <= 0 for '<' rows, >= 0 for '>' rows
  Eigen::VectorXd reduced_cost;  // structural reduced costs
  Basis basis;
  long iterations = 0;
  int first_infeasible_row = -1;  // set when status == infeasible
  double primal_residual = 0.0;
  double duality_gap = 0.0;
};

struct LpOptions {
  double feas_tol = 1e-7;
  double opt_tol = 1e-7;
  int refactor_every = 50;
  long max_iterations = 0;  // 0 = automatic from problem size
  bool scale = true;
  long stall_limit = 2000;  // degenerate iterations before Bland's rule kicks in
};

// Revised primal simplex for bounded variables: two-phase, PFI eta updates
// between sparse-LU refactorizations, geometric-mean scaling, deterministic
// lowest-index tie-breaking. Entering/leaving rules and tolerances are fixed,
// so identical inputs produce identical bases and duals.
LpSolution solve_lp(const BoundedLp& lp, const Basis* warm = nullptr,
                    const LpOptions& opts = {});

}  // namespace dsom

#include "dsom/milp.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

namespace dsom {

const char* to_string(MilpStatus s) {
  switch (s) {
    case MilpStatus::optimal: return "optimal";
    case MilpStatus::infeasible: return "infeasible";
    case MilpStatus::unbounded: return "unbounded";
    case MilpStatus::node_limit: return "node_limit";
    case MilpStatus::breakdown: return "breakdown";
  }
  return "unknown";
}

namespace {

struct Node {
  double bound = 0.0;
  long id = 0;
  std::vector<std::pair<int, double>> fixes;
  Basis basis;
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;  // min-heap on bound
    return a.id > b.id;
  }
};

BoundedLp lp_with_fixes(const BoundedLp& base,
                        const std::vector<std::pair<int, double>>& fixes) {
  BoundedLp lp = base;
  for (const auto& [col, v] : fixes) {
    lp.lo[col] = v;
    lp.hi[col] = v;
  }
  return lp;
}

// most fractional binary; ties to the lowest column id
int pick_branch(const Eigen::VectorXd& x, const std::vector<int>& bins,
                double int_tol) {
  int best = -1;
  double best_frac = int_tol;
  for (int c : bins) {
    const double f = std::abs(x[c] - std::round(x[c]));
    if (f > best_frac + 1e-12) {
      best_frac = f;
      best = c;
    }
  }
  return best;
}

std::string hint_for_row(const Model& model, int row) {
  if (row < 0 || row >= static_cast<int>(model.row_tags.size())) return "";
  return model.row_name(row);
}

}  // namespace

MilpSolution solve_milp(const Model& model, const MilpOptions& opts) {
  MilpSolution out;
  const std::vector<int> bins = model.binary_columns();

  LpSolution root = solve_lp(model.lp, nullptr, opts.lp);
  out.node_count = 1;
  out.lp_iterations = root.iterations;
  if (root.status == LpStatus::infeasible) {
    out.status = MilpStatus::infeasible;
    out.infeasible_hint = hint_for_row(model, root.first_infeasible_row);
    return out;
  }
  if (root.status == LpStatus::unbounded) {
    out.status = MilpStatus::unbounded;
    return out;
  }
  if (root.status != LpStatus::optimal) {
    out.status = MilpStatus::breakdown;
    return out;
  }

  bool have_inc = false;
  double inc_obj = 0.0;
  Eigen::VectorXd inc_x;
  Basis inc_basis;

  auto consider_incumbent = [&](const LpSolution& s) {
    if (!have_inc || s.objective < inc_obj - 1e-12) {
      have_inc = true;
      inc_obj = s.objective;
      inc_x = s.x;
      inc_basis = s.basis;
    }
  };

  std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
  long next_id = 1;

  const int root_branch = pick_branch(root.x, bins, opts.int_tol);
  if (root_branch < 0) {
    consider_incumbent(root);
  } else {
    // rounding heuristic for an early pruning bound
    if (!bins.empty()) {
      std::vector<std::pair<int, double>> fixes;
      fixes.reserve(bins.size());
      for (int c : bins) fixes.emplace_back(c, std::round(root.x[c]));
      LpSolution h = solve_lp(lp_with_fixes(model.lp, fixes), &root.basis, opts.lp);
      out.lp_iterations += h.iterations;
      if (h.status == LpStatus::optimal) consider_incumbent(h);
    }
    for (double v : {0.0, 1.0}) {
      Node child;
      child.bound = root.objective;
      child.id = next_id++;
      child.fixes = {{root_branch, v}};
      child.basis = root.basis;
      open.push(std::move(child));
    }
  }

  while (!open.empty()) {
    if (out.node_count >= opts.max_nodes) {
      out.status = MilpStatus::node_limit;
      return out;
    }
    Node node = open.top();
    open.pop();
    if (have_inc && node.bound >= inc_obj - opts.abs_gap) break;  // best-first: done

    LpSolution s =
        solve_lp(lp_with_fixes(model.lp, node.fixes), &node.basis, opts.lp);
    ++out.node_count;
    out.lp_iterations += s.iterations;
    if (s.status == LpStatus::infeasible) {
      if (out.infeasible_hint.empty())
        out.infeasible_hint = hint_for_row(model, s.first_infeasible_row);
      continue;
    }
    if (s.status != LpStatus::optimal) {
      out.status = MilpStatus::breakdown;
      return out;
    }
    if (have_inc && s.objective >= inc_obj - opts.abs_gap) continue;

    const int branch = pick_branch(s.x, bins, opts.int_tol);
    if (branch < 0) {
      consider_incumbent(s);
      continue;
    }
    for (double v : {0.0, 1.0}) {
      Node child;
      child.bound = s.objective;
      child.id = next_id++;
      child.fixes = node.fixes;
      child.fixes.emplace_back(branch, v);
      child.basis = s.basis;
      open.push(std::move(child));
    }
  }

  if (!have_inc) {
    out.status = MilpStatus::infeasible;
    out.infeasible_hint = hint_for_row(model, root.first_infeasible_row);
    return out;
  }

  out.status = MilpStatus::optimal;
  out.x = inc_x;
  out.objective = inc_obj;
  out.binary_values.reserve(bins.size());
  for (int c : bins) out.binary_values.push_back(std::round(inc_x[c]));
  out.pricing = fix_and_price(model, out.binary_values, opts);
  if (out.pricing.status == LpStatus::optimal) {
    // the pricing LP is the incumbent's LP; adopt its (identical) primal
    out.x = out.pricing.x;
  }
  return out;
}

LpSolution fix_and_price(const Model& model, const std::vector<double>& assignment,
                         const MilpOptions& opts) {
  const std::vector<int> bins = model.binary_columns();
  if (assignment.size() != bins.size())
    throw std::invalid_argument("assignment size mismatch");
  std::vector<std::pair<int, double>> fixes;
  fixes.reserve(bins.size());
  for (size_t i = 0; i < bins.size(); ++i) fixes.emplace_back(bins[i], assignment[i]);

  BoundedLp fixed = lp_with_fixes(model.lp, fixes);
  LpSolution exact = solve_lp(fixed, nullptr, opts.lp);
  if (exact.status != LpStatus::optimal || opts.pricing_load_shift == 0.0)
    return exact;

  BoundedLp shifted = fixed;
  for (int r = 0; r < static_cast<int>(model.row_tags.size()); ++r) {
    const RowFamily f = model.row_tags[r].family;
    if (f == RowFamily::balance_p || f == RowFamily::adj_p)
      shifted.rhs[r] += opts.pricing_load_shift;
  }
  LpSolution priced = solve_lp(shifted, &exact.basis, opts.lp);
  if (priced.status != LpStatus::optimal) return exact;

  // exact primal + load-marginal duals; both optimal for the unshifted LP
  exact.row_dual = priced.row_dual;
  exact.reduced_cost = priced.reduced_cost;
  exact.basis = priced.basis;
  exact.iterations += priced.iterations;
  return exact;
}

MilpSolution brute_force_milp(const Model& model, const MilpOptions& opts) {
  const std::vector<int> bins = model.binary_columns();
  const int nb = static_cast<int>(bins.size());
  if (nb > 20) throw std::invalid_argument("brute force limited to 20 binaries");

  MilpSolution out;
  out.status = MilpStatus::infeasible;
  std::vector<double> assign(nb, 0.0);
  const long total = 1L << nb;
  for (long code = 0; code < total; ++code) {
    // lexicographic order: first binary is the most significant digit
    std::vector<std::pair<int, double>> fixes;
    fixes.reserve(nb);
    for (int i = 0; i < nb; ++i) {
      assign[i] = (code >> (nb - 1 - i)) & 1L ? 1.0 : 0.0;
      fixes.emplace_back(bins[i], assign[i]);
    }
    LpSolution s = solve_lp(lp_with_fixes(model.lp, fixes), nullptr, opts.lp);
    ++out.node_count;
    out.lp_iterations += s.iterations;
    if (s.status != LpStatus::optimal) continue;
    if (out.status != MilpStatus::optimal || s.objective < out.objective - 1e-12) {
      out.status = MilpStatus::optimal;
      out.objective = s.objective;
      out.x = s.x;
      out.binary_values = assign;
    }
  }
  if (out.status == MilpStatus::optimal)
    out.pricing = fix_and_price(model, out.binary_values, opts);
  return out;
}

}  // namespace dsom

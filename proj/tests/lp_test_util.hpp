#pragma once

// Shared helpers for solver tests: a deterministic random-LP generator, a
// brute-force vertex-enumeration oracle for small dense LPs, and optimality
// certificate checks. Test-only code, independent of the simplex internals.

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "dsom/lp.hpp"

namespace lptest {

constexpr double kInf = std::numeric_limits<double>::infinity();

inline dsom::BoundedLp make_lp(int m, int n,
                               const std::vector<Eigen::Triplet<double>>& trips,
                               const std::vector<double>& rhs,
                               const std::vector<char>& sense,
                               const std::vector<double>& lo,
                               const std::vector<double>& hi,
                               const std::vector<double>& obj) {
  dsom::BoundedLp lp;
  lp.A.resize(m, n);
  lp.A.setFromTriplets(trips.begin(), trips.end());
  lp.rhs = Eigen::Map<const Eigen::VectorXd>(rhs.data(), m);
  lp.sense = sense;
  lp.lo = Eigen::Map<const Eigen::VectorXd>(lo.data(), n);
  lp.hi = Eigen::Map<const Eigen::VectorXd>(hi.data(), n);
  lp.obj = Eigen::Map<const Eigen::VectorXd>(obj.data(), n);
  return lp;
}

// Random feasible bounded LP: constructed around an interior point so
// feasibility is guaranteed by construction.
inline dsom::BoundedLp random_lp(std::mt19937& rng, int m, int n,
                                 bool with_equalities = true) {
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  auto round2 = [](double v) { return std::round(v * 100.0) / 100.0; };

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, n);
  std::vector<Eigen::Triplet<double>> trips;
  for (int i = 0; i < m; ++i) {
    int nz = 0;
    for (int j = 0; j < n; ++j) {
      if (u01(rng) < 0.35) {
        const double v = round2(coef(rng));
        if (v != 0.0) {
          A(i, j) = v;
          trips.emplace_back(i, j, v);
          ++nz;
        }
      }
    }
    if (nz == 0) {  // no empty rows
      const int j = static_cast<int>(u01(rng) * n) % n;
      A(i, j) = 1.0;
      trips.emplace_back(i, j, 1.0);
    }
  }

  std::vector<double> x0(n), lo(n), hi(n), obj(n);
  for (int j = 0; j < n; ++j) {
    x0[j] = round2(u01(rng) * 5.0);
    lo[j] = round2(x0[j] - 0.5 - 3.0 * u01(rng));
    hi[j] = round2(x0[j] + 0.5 + 3.0 * u01(rng));
    obj[j] = round2(coef(rng) * 2.5);
  }
  Eigen::VectorXd act = A * Eigen::Map<const Eigen::VectorXd>(x0.data(), n);
  std::vector<double> rhs(m);
  std::vector<char> sense(m);
  for (int i = 0; i < m; ++i) {
    const double r = u01(rng);
    if (with_equalities && r < 0.2) {
      sense[i] = '=';
      rhs[i] = act[i];
    } else if (r < 0.6) {
      sense[i] = '<';
      rhs[i] = round2(act[i] + 0.1 + 2.0 * u01(rng));
    } else {
      sense[i] = '>';
      rhs[i] = round2(act[i] - 0.1 - 2.0 * u01(rng));
    }
  }
  return make_lp(m, n, trips, rhs, sense, lo, hi, obj);
}

// Enumerates candidate vertices (all choices of n active constraints among
// rows-as-equalities and variable bounds) and returns the best feasible
// objective. Exponential; only for tiny instances.
struct VertexOracle {
  bool feasible = false;
  double objective = kInf;
};

inline VertexOracle vertex_enumeration(const dsom::BoundedLp& lp, double tol = 1e-7) {
  const int m = lp.rows(), n = lp.cols();
  Eigen::MatrixXd A = Eigen::MatrixXd(lp.A);

  // candidate active sets: each candidate is one linear equation
  struct Cand {
    Eigen::RowVectorXd a;
    double b;
    bool forced;  // kept for readability of construction
  };
  std::vector<Cand> cands;
  for (int i = 0; i < m; ++i)
    cands.push_back({A.row(i), lp.rhs[i], lp.sense[i] == '='});
  for (int j = 0; j < n; ++j) {
    if (std::isfinite(lp.lo[j])) {
      Eigen::RowVectorXd e = Eigen::RowVectorXd::Zero(n);
      e[j] = 1.0;
      cands.push_back({e, lp.lo[j], false});
    }
    if (std::isfinite(lp.hi[j]) && lp.hi[j] != lp.lo[j]) {
      Eigen::RowVectorXd e = Eigen::RowVectorXd::Zero(n);
      e[j] = 1.0;
      cands.push_back({e, lp.hi[j], false});
    }
  }

  VertexOracle out;
  const int need = n;
  const int ncand = static_cast<int>(cands.size());
  if (need > ncand) return out;

  auto check_point = [&](const Eigen::VectorXd& x) {
    for (int j = 0; j < n; ++j)
      if (x[j] < lp.lo[j] - tol || x[j] > lp.hi[j] + tol) return;
    Eigen::VectorXd act = A * x;
    for (int i = 0; i < m; ++i) {
      switch (lp.sense[i]) {
        case '<': if (act[i] > lp.rhs[i] + tol) return; break;
        case '>': if (act[i] < lp.rhs[i] - tol) return; break;
        default:  if (std::abs(act[i] - lp.rhs[i]) > tol) return; break;
      }
    }
    out.feasible = true;
    out.objective = std::min(out.objective, lp.obj.dot(x));
  };

  Eigen::MatrixXd M(n, n);
  Eigen::VectorXd rhs(n);
  std::vector<int> idx(need);
  for (int k = 0; k < need; ++k) idx[k] = k;
  while (true) {
    for (int k = 0; k < need; ++k) {
      M.row(k) = cands[idx[k]].a;
      rhs[k] = cands[idx[k]].b;
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
    if (lu.rank() == n) check_point(lu.solve(rhs));

    int k = need - 1;
    while (k >= 0 && idx[k] == ncand - need + k) --k;
    if (k < 0) break;
    ++idx[k];
    for (int k2 = k + 1; k2 < need; ++k2) idx[k2] = idx[k2 - 1] + 1;
  }
  return out;
}

// Optimality certificates: primal feasibility, dual sign conventions,
// complementary slackness and the strong-duality identity.
struct CertReport {
  double primal_violation = 0.0;
  double dual_sign_violation = 0.0;
  double comp_slack = 0.0;
  double duality_gap = 0.0;
  double reduced_cost_violation = 0.0;
};

inline CertReport check_certificates(const dsom::BoundedLp& lp,
                                     const dsom::LpSolution& sol) {
  CertReport rep;
  const int m = lp.rows(), n = lp.cols();
  Eigen::VectorXd act = lp.A * sol.x;
  for (int i = 0; i < m; ++i) {
    const double scale = 1.0 + std::abs(lp.rhs[i]);
    double slack = 0.0;
    switch (lp.sense[i]) {
      case '<':
        rep.primal_violation = std::max(rep.primal_violation, (act[i] - lp.rhs[i]) / scale);
        rep.dual_sign_violation = std::max(rep.dual_sign_violation, sol.row_dual[i]);
        slack = lp.rhs[i] - act[i];
        break;
      case '>':
        rep.primal_violation = std::max(rep.primal_violation, (lp.rhs[i] - act[i]) / scale);
        rep.dual_sign_violation = std::max(rep.dual_sign_violation, -sol.row_dual[i]);
        slack = act[i] - lp.rhs[i];
        break;
      default:
        rep.primal_violation =
            std::max(rep.primal_violation, std::abs(act[i] - lp.rhs[i]) / scale);
        slack = 0.0;
        break;
    }
    rep.comp_slack = std::max(rep.comp_slack,
                              std::abs(sol.row_dual[i] * slack) / (1.0 + std::abs(slack)));
  }
  // dual objective for bounded LPs: y'b + sum of d_j times the bound the
  // sign of d_j pins the variable to
  double dual_obj = sol.row_dual.dot(lp.rhs);
  for (int j = 0; j < n; ++j) {
    const double x = sol.x[j];
    const double scale = 1.0 + std::abs(x);
    rep.primal_violation = std::max(rep.primal_violation, (lp.lo[j] - x) / scale);
    rep.primal_violation = std::max(rep.primal_violation, (x - lp.hi[j]) / scale);
    const double d = sol.reduced_cost[j];
    if (std::abs(d) > 1e-9) {
      if (d > 0.0 && std::isfinite(lp.lo[j])) {
        dual_obj += d * lp.lo[j];
      } else if (d < 0.0 && std::isfinite(lp.hi[j])) {
        dual_obj += d * lp.hi[j];
      } else {
        rep.reduced_cost_violation = std::max(rep.reduced_cost_violation, std::abs(d));
      }
    }
    if (lp.lo[j] == lp.hi[j]) continue;  // fixed column: any sign is fine
    const double dist_lo = std::isfinite(lp.lo[j]) ? x - lp.lo[j] : kInf;
    const double dist_hi = std::isfinite(lp.hi[j]) ? lp.hi[j] - x : kInf;
    if (d > 1e-9) {
      rep.comp_slack = std::max(rep.comp_slack, std::min(dist_lo, 1.0) * d / (1.0 + d));
    } else if (d < -1e-9) {
      rep.comp_slack = std::max(rep.comp_slack, std::min(dist_hi, 1.0) * -d / (1.0 - d));
    }
  }
  rep.duality_gap = std::abs(sol.objective - dual_obj) / (1.0 + std::abs(sol.objective));
  return rep;
}

}  // namespace lptest

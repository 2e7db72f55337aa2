#include "dsom/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/SparseLU>

namespace dsom {

const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
    case LpStatus::breakdown: return "breakdown";
    case LpStatus::iteration_limit: return "iteration_limit";
  }
  return "unknown";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kZeroTol = 1e-11;   // smallest usable pivot / direction entry
constexpr double kRatioTie = 1e-9;
constexpr double kPriceTie = 1e-9;

// Power-of-two scale factors keep scaling exact in floating point.
double pow2_scale(double s) {
  if (!(s > 0.0) || !std::isfinite(s)) return 1.0;
  return std::exp2(std::round(std::log2(s)));
}

struct Eta {
  int r = 0;
  double wr = 0.0;
  std::vector<std::pair<int, double>> w;
};

class Simplex {
 public:
  Simplex(const BoundedLp& lp, const LpOptions& opts) : lp_(lp), opts_(opts) {
    m_ = lp.rows();
    n_ = lp.cols();
    nm_ = n_ + m_;
    build_scaled();
  }

  LpSolution run(const Basis* warm) {
    LpSolution sol;
    if (!init_basis(warm)) {
      sol.status = LpStatus::breakdown;
      return sol;
    }
    const LpStatus st = iterate();
    assemble(st, sol);
    return sol;
  }

 private:
  // ---- setup ----------------------------------------------------------

  void build_scaled() {
    rscale_.assign(m_, 1.0);
    cscale_.assign(n_, 1.0);
    if (opts_.scale && lp_.A.nonZeros() > 0) {
      // geometric-mean scaling, a few sweeps, rounded to powers of two
      for (int pass = 0; pass < 3; ++pass) {
        std::vector<double> rmin(m_, kInf), rmax(m_, 0.0);
        for (int j = 0; j < n_; ++j) {
          for (Eigen::SparseMatrix<double>::InnerIterator it(lp_.A, j); it; ++it) {
            const double v = std::abs(it.value()) * rscale_[it.row()] * cscale_[j];
            if (v == 0.0) continue;
            rmin[it.row()] = std::min(rmin[it.row()], v);
            rmax[it.row()] = std::max(rmax[it.row()], v);
          }
        }
        for (int i = 0; i < m_; ++i)
          if (rmax[i] > 0.0)
            rscale_[i] = pow2_scale(rscale_[i] / std::sqrt(rmin[i] * rmax[i]));
        std::vector<double> cmin(n_, kInf), cmax(n_, 0.0);
        for (int j = 0; j < n_; ++j) {
          for (Eigen::SparseMatrix<double>::InnerIterator it(lp_.A, j); it; ++it) {
            const double v = std::abs(it.value()) * rscale_[it.row()] * cscale_[j];
            if (v == 0.0) continue;
            cmin[j] = std::min(cmin[j], v);
            cmax[j] = std::max(cmax[j], v);
          }
        }
        for (int j = 0; j < n_; ++j)
          if (cmax[j] > 0.0)
            cscale_[j] = pow2_scale(cscale_[j] / std::sqrt(cmin[j] * cmax[j]));
      }
    }

    As_ = lp_.A;
    for (int j = 0; j < n_; ++j)
      for (Eigen::SparseMatrix<double>::InnerIterator it(As_, j); it; ++it)
        it.valueRef() *= rscale_[it.row()] * cscale_[j];
    As_.makeCompressed();

    bs_.resize(m_);
    for (int i = 0; i < m_; ++i) bs_[i] = lp_.rhs[i] * rscale_[i];

    lob_.assign(nm_, 0.0);
    upb_.assign(nm_, 0.0);
    cost_.assign(nm_, 0.0);
    for (int j = 0; j < n_; ++j) {
      lob_[j] = lp_.lo[j] / cscale_[j];
      upb_[j] = lp_.hi[j] / cscale_[j];
      cost_[j] = lp_.obj[j] * cscale_[j];
    }
    for (int i = 0; i < m_; ++i) {
      const int j = n_ + i;
      switch (lp_.sense[i]) {
        case '<': lob_[j] = 0.0;  upb_[j] = kInf; break;
        case '>': lob_[j] = -kInf; upb_[j] = 0.0; break;
        default:  lob_[j] = 0.0;  upb_[j] = 0.0; break;
      }
    }
  }

  bool warm_basis_usable(const Basis& b) const {
    if (static_cast<int>(b.basic.size()) != m_) return false;
    if (static_cast<int>(b.status.size()) != nm_) return false;
    std::vector<char> seen(nm_, 0);
    for (int i = 0; i < m_; ++i) {
      const int j = b.basic[i];
      if (j < 0 || j >= nm_ || seen[j]) return false;
      seen[j] = 1;
      if (b.status[j] != VarStatus::basic) return false;
    }
    return true;
  }

  bool init_basis(const Basis* warm) {
    stat_.assign(nm_, VarStatus::at_lower);
    basic_.assign(m_, 0);
    xval_.assign(nm_, 0.0);

    bool adopted = false;
    if (warm != nullptr && !warm->empty() && warm_basis_usable(*warm)) {
      basic_ = warm->basic;
      stat_ = warm->status;
      adopted = factorize();
    }
    if (!adopted) {
      for (int i = 0; i < m_; ++i) {
        basic_[i] = n_ + i;
        stat_[n_ + i] = VarStatus::basic;
      }
      for (int j = 0; j < n_; ++j) stat_[j] = initial_status(j);
      if (!factorize()) return false;
    }
    for (int j = 0; j < nm_; ++j)
      if (stat_[j] != VarStatus::basic) xval_[j] = nonbasic_value(j);
    compute_basic_values();
    return true;
  }

  VarStatus initial_status(int j) const {
    const bool lo_fin = lob_[j] > -kInf;
    const bool hi_fin = upb_[j] < kInf;
    if (!lo_fin && !hi_fin) return VarStatus::nonbasic_free;
    if (lo_fin && !hi_fin) return VarStatus::at_lower;
    if (!lo_fin && hi_fin) return VarStatus::at_upper;
    return std::abs(lob_[j]) <= std::abs(upb_[j]) ? VarStatus::at_lower
                                                  : VarStatus::at_upper;
  }

  double nonbasic_value(int j) const {
    switch (stat_[j]) {
      case VarStatus::at_lower: return lob_[j] > -kInf ? lob_[j] : 0.0;
      case VarStatus::at_upper: return upb_[j] < kInf ? upb_[j] : 0.0;
      default: return 0.0;
    }
  }

  // ---- factorization ---------------------------------------------------

  void column_of(int j, std::vector<std::pair<int, double>>& out) const {
    out.clear();
    if (j < n_) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(As_, j); it; ++it)
        out.emplace_back(static_cast<int>(it.row()), it.value());
    } else {
      out.emplace_back(j - n_, 1.0);
    }
  }

  bool factorize() {
    std::vector<Eigen::Triplet<double>> trips;
    std::vector<std::pair<int, double>> col;
    for (int i = 0; i < m_; ++i) {
      column_of(basic_[i], col);
      for (const auto& [r, v] : col) trips.emplace_back(r, i, v);
    }
    Eigen::SparseMatrix<double> B(m_, m_);
    B.setFromTriplets(trips.begin(), trips.end());
    lu_.compute(B);
    if (lu_.info() != Eigen::Success) return false;
    etas_.clear();
    return true;
  }

  void compute_basic_values() {
    Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(bs_.data(), m_);
    for (int j = 0; j < nm_; ++j) {
      if (stat_[j] == VarStatus::basic) continue;
      const double xj = xval_[j];
      if (xj == 0.0) continue;
      if (j < n_) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(As_, j); it; ++it)
          v[it.row()] -= it.value() * xj;
      } else {
        v[j - n_] -= xj;
      }
    }
    ftran(v);
    xb_ = v;
  }

  void ftran(Eigen::VectorXd& v) const {
    v = lu_.solve(v);
    for (const Eta& e : etas_) {
      const double t = v[e.r] / e.wr;
      if (t != 0.0) {
        for (const auto& [i, w] : e.w) v[i] -= t * w;
      }
      v[e.r] = t;
    }
  }

  void btran(Eigen::VectorXd& v) {
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
      double s = 0.0;
      for (const auto& [i, w] : it->w) s += w * v[i];
      v[it->r] = (v[it->r] * (1.0 + it->wr) - s) / it->wr;
    }
    v = lu_.adjoint().solve(v);
  }

  // ---- iteration -------------------------------------------------------

  double infeasibility(Eigen::VectorXd* grad) const {
    double sum = 0.0;
    if (grad) grad->setZero(m_);
    for (int i = 0; i < m_; ++i) {
      const int j = basic_[i];
      const double x = xb_[i];
      if (x < lob_[j] - opts_.feas_tol) {
        sum += lob_[j] - x;
        if (grad) (*grad)[i] = -1.0;
      } else if (x > upb_[j] + opts_.feas_tol) {
        sum += x - upb_[j];
        if (grad) (*grad)[i] = 1.0;
      }
    }
    return sum;
  }

  double reduced_cost(int j, const Eigen::VectorXd& y, bool phase2) const {
    double d = phase2 ? cost_[j] : 0.0;
    if (j < n_) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(As_, j); it; ++it)
        d -= it.value() * y[it.row()];
    } else {
      d -= y[j - n_];
    }
    return d;
  }

  // Chooses the entering column. Returns -1 when priced out (optimal for the
  // current phase). Deterministic: Dantzig score with lowest-index tie-break,
  // or plain lowest eligible index in Bland mode.
  int price(const Eigen::VectorXd& y, bool phase2, int& dir_out) {
    int best = -1, best_dir = 0;
    double best_score = -opts_.opt_tol;
    for (int j = 0; j < nm_; ++j) {
      const VarStatus st = stat_[j];
      if (st == VarStatus::basic) continue;
      if (lob_[j] == upb_[j]) continue;  // fixed
      const double d = reduced_cost(j, y, phase2);
      double score = 0.0;
      int dir = 0;
      if (st == VarStatus::at_lower && d < -opts_.opt_tol) {
        score = d;
        dir = 1;
      } else if (st == VarStatus::at_upper && d > opts_.opt_tol) {
        score = -d;
        dir = -1;
      } else if (st == VarStatus::nonbasic_free && std::abs(d) > opts_.opt_tol) {
        score = -std::abs(d);
        dir = d < 0.0 ? 1 : -1;
      } else {
        continue;
      }
      if (bland_) {
        dir_out = dir;
        return j;  // first eligible
      }
      if (score < best_score - kPriceTie) {
        best = j;
        best_dir = dir;
        best_score = score;
      }
    }
    dir_out = best_dir;
    return best;
  }

  struct Ratio {
    double theta = kInf;
    int leave_pos = -1;   // -2 = bound flip of the entering column
    bool to_upper = false;
  };

  Ratio ratio_test(int enter, int dir, const Eigen::VectorXd& w, bool phase2) const {
    Ratio best;
    double best_pivot = 0.0;
    for (int i = 0; i < m_; ++i) {
      const double wi = w[i];
      if (std::abs(wi) <= kZeroTol) continue;
      const int j = basic_[i];
      const double x = xb_[i];
      const double l = lob_[j], u = upb_[j];
      const double delta = -dir * wi;
      double bp = kInf;
      bool up = false;
      if (!phase2 && x < l - opts_.feas_tol) {
        if (delta > 0.0) { bp = (l - x) / delta; up = false; }
      } else if (!phase2 && x > u + opts_.feas_tol) {
        if (delta < 0.0) { bp = (u - x) / delta; up = true; }
      } else if (delta > 0.0) {
        if (u < kInf) { bp = (u - x) / delta; up = true; }
      } else {
        if (l > -kInf) { bp = (l - x) / delta; up = false; }
      }
      if (bp == kInf) continue;
      bp = std::max(bp, 0.0);
      const double piv = std::abs(wi);
      bool take = false;
      if (bp < best.theta - kRatioTie) {
        take = true;
      } else if (bp < best.theta + kRatioTie) {
        if (bland_) {
          take = best.leave_pos < 0 || j < basic_[best.leave_pos];
        } else {
          take = piv > best_pivot * (1.0 + 1e-12);
        }
      }
      if (take) {
        best.theta = bp;
        best.leave_pos = i;
        best.to_upper = up;
        best_pivot = piv;
      }
    }
    // bound flip of the entering column
    const double range = upb_[enter] - lob_[enter];
    if (std::isfinite(range) && range < best.theta - kRatioTie) {
      best.theta = range;
      best.leave_pos = -2;
    }
    return best;
  }

  void pivot(int enter, int dir, const Ratio& r, const Eigen::VectorXd& w) {
    const double theta = r.theta;
    if (theta != 0.0) xb_ -= (dir * theta) * w;
    const double enter_val = xval_[enter] + dir * theta;
    if (r.leave_pos == -2) {
      stat_[enter] = dir > 0 ? VarStatus::at_upper : VarStatus::at_lower;
      xval_[enter] = nonbasic_value(enter);
      return;
    }
    const int leave = basic_[r.leave_pos];
    stat_[leave] = r.to_upper ? VarStatus::at_upper : VarStatus::at_lower;
    xval_[leave] = nonbasic_value(leave);
    basic_[r.leave_pos] = enter;
    stat_[enter] = VarStatus::basic;
    xb_[r.leave_pos] = enter_val;

    Eta e;
    e.r = r.leave_pos;
    e.wr = w[r.leave_pos];
    e.w.reserve(64);
    for (int i = 0; i < m_; ++i)
      if (w[i] != 0.0) e.w.emplace_back(i, w[i]);
    etas_.push_back(std::move(e));
    ++pivots_;

    if (static_cast<int>(etas_.size()) >= opts_.refactor_every) {
      if (!factorize()) { broken_ = true; return; }
      compute_basic_values();
    }
  }

  double phase2_objective() const {
    double v = 0.0;
    for (int j = 0; j < nm_; ++j)
      if (stat_[j] != VarStatus::basic && cost_[j] != 0.0) v += cost_[j] * xval_[j];
    for (int i = 0; i < m_; ++i)
      if (cost_[basic_[i]] != 0.0) v += cost_[basic_[i]] * xb_[i];
    return v;
  }

  LpStatus iterate() {
    const long max_iters =
        opts_.max_iterations > 0 ? opts_.max_iterations : 10000L + 50L * nm_;
    bool phase2 = false;
    double last_progress_value = kInf;
    long stall = 0;

    Eigen::VectorXd y(m_), w(m_);
    std::vector<std::pair<int, double>> col;

    while (iters_ < max_iters) {
      if (broken_) return LpStatus::breakdown;
      ++iters_;

      if (!phase2) {
        Eigen::VectorXd g;
        const double inf_sum = infeasibility(&g);
        if (inf_sum == 0.0) {
          phase2 = true;
          last_progress_value = kInf;
          stall = 0;
          --iters_;
          continue;
        }
        y = g;
        btran(y);
        int dir = 0;
        const int enter = price(y, false, dir);
        if (enter < 0) return LpStatus::infeasible;
        column_of(enter, col);
        w.setZero(m_);
        for (const auto& [ri, v] : col) w[ri] = v;
        ftran(w);
        const Ratio r = ratio_test(enter, dir, w, false);
        if (r.theta == kInf) return LpStatus::breakdown;
        pivot(enter, dir, r, w);
        if (inf_sum < last_progress_value - 1e-12) {
          last_progress_value = inf_sum;
          stall = 0;
        } else if (++stall > opts_.stall_limit) {
          bland_ = true;
        }
        continue;
      }

      // phase 2
      y.setZero(m_);
      for (int i = 0; i < m_; ++i) y[i] = cost_[basic_[i]];
      btran(y);
      int dir = 0;
      const int enter = price(y, true, dir);
      if (enter < 0) return LpStatus::optimal;
      column_of(enter, col);
      w.setZero(m_);
      for (const auto& [ri, v] : col) w[ri] = v;
      ftran(w);
      const Ratio r = ratio_test(enter, dir, w, true);
      if (r.theta == kInf) return LpStatus::unbounded;
      const double obj_before = phase2_objective();
      pivot(enter, dir, r, w);
      if (obj_before < last_progress_value - 1e-12 * (1.0 + std::abs(obj_before))) {
        last_progress_value = obj_before;
        stall = 0;
      } else if (++stall > opts_.stall_limit) {
        bland_ = true;
      }
      // a phase-2 step can drift out of bounds only via numerics; re-enter
      // phase 1 if that happens
      Eigen::VectorXd dummy;
      if (infeasibility(nullptr) > 0.0) phase2 = false;
    }
    return LpStatus::iteration_limit;
  }

  // ---- final assembly ---------------------------------------------------

  void assemble(LpStatus st, LpSolution& sol) {
    sol.status = st;
    sol.iterations = iters_;
    sol.basis.basic = basic_;
    sol.basis.status = stat_;

    // structural values, unscaled
    std::vector<double> full(nm_, 0.0);
    for (int j = 0; j < nm_; ++j)
      if (stat_[j] != VarStatus::basic) full[j] = xval_[j];
    for (int i = 0; i < m_; ++i) full[basic_[i]] = xb_[i];
    sol.x.resize(n_);
    for (int j = 0; j < n_; ++j) sol.x[j] = full[j] * cscale_[j];
    sol.objective = lp_.obj.dot(sol.x);

    if (st == LpStatus::infeasible) {
      sol.first_infeasible_row = find_violated_row(sol.x);
      return;
    }
    if (st != LpStatus::optimal) return;

    Eigen::VectorXd y(m_);
    for (int i = 0; i < m_; ++i) y[i] = cost_[basic_[i]];
    btran(y);
    sol.row_dual.resize(m_);
    for (int i = 0; i < m_; ++i) sol.row_dual[i] = y[i] * rscale_[i];
    sol.reduced_cost.resize(n_);
    for (int j = 0; j < n_; ++j)
      sol.reduced_cost[j] = reduced_cost(j, y, true) / cscale_[j];

    // certificates: feasibility on the scaled data, duality gap on originals
    double prim = 0.0;
    for (int i = 0; i < m_; ++i) {
      const int j = basic_[i];
      prim = std::max(prim, lob_[j] - xb_[i]);
      prim = std::max(prim, xb_[i] - upb_[j]);
    }
    sol.primal_residual = std::max(prim, 0.0);

    double dual_obj = sol.row_dual.dot(lp_.rhs);
    for (int j = 0; j < n_; ++j) {
      if (stat_[j] == VarStatus::at_lower || stat_[j] == VarStatus::at_upper)
        dual_obj += sol.reduced_cost[j] * sol.x[j];
    }
    sol.duality_gap = std::abs(sol.objective - dual_obj);
  }

  int find_violated_row(const Eigen::VectorXd& x) const {
    Eigen::VectorXd act = lp_.A * x;
    int worst = 0;
    double worst_v = -1.0;
    for (int i = 0; i < m_; ++i) {
      double v = 0.0;
      switch (lp_.sense[i]) {
        case '<': v = act[i] - lp_.rhs[i]; break;
        case '>': v = lp_.rhs[i] - act[i]; break;
        default: v = std::abs(act[i] - lp_.rhs[i]); break;
      }
      const double rel = v / (1.0 + std::abs(lp_.rhs[i]));
      if (rel > 1e-6) return i;
      if (v > worst_v) { worst_v = v; worst = i; }
    }
    return worst;
  }

  const BoundedLp& lp_;
  LpOptions opts_;
  int m_ = 0, n_ = 0, nm_ = 0;

  Eigen::SparseMatrix<double> As_;
  std::vector<double> bs_, lob_, upb_, cost_, rscale_, cscale_;

  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu_;
  std::vector<Eta> etas_;
  std::vector<int> basic_;
  std::vector<VarStatus> stat_;
  std::vector<double> xval_;  // nonbasic values
  Eigen::VectorXd xb_;

  bool bland_ = false;
  bool broken_ = false;
  long iters_ = 0;
  long pivots_ = 0;
};

}  // namespace

LpSolution solve_lp(const BoundedLp& lp, const Basis* warm, const LpOptions& opts) {
  Simplex s(lp, opts);
  return s.run(warm);
}

}  // namespace dsom

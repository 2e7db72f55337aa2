// Acceptance suite: end-to-end behavioral criteria with fixed tolerances.
// Prints one pass/fail line per criterion; exits nonzero if any fail.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "dsom/audit.hpp"
#include "dsom/instance.hpp"
#include "dsom/milp.hpp"
#include "dsom/pricing.hpp"
#include "dsom/scenario.hpp"
#include "lp_test_util.hpp"

using namespace dsom;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;
std::vector<std::string> notes;

void note(const char* fmt, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, fmt);
  std::vsnprintf(buf, sizeof(buf), fmt, ap);
  va_end(ap);
  notes.push_back(buf);
}

void report(int id, const char* name, bool pass, double seconds) {
  std::printf("[%s] criterion %d: %s (%.1fs)\n", pass ? "PASS" : "FAIL", id,
              name, seconds);
  for (const std::string& n : notes) std::printf("       %s\n", n.c_str());
  notes.clear();
  if (!pass) ++failures;
  std::fflush(stdout);
}

struct Timer {
  Clock::time_point start = Clock::now();
  double seconds() const {
    return std::chrono::duration<double>(Clock::now() - start).count();
  }
};

struct SolvedCase {
  Instance inst;
  ScenarioSet scen;
  Model model;
  MilpSolution sol;
  LmpSurface lmps;
};

bool solve_builtin(CaseMode mode, SolvedCase& out) {
  std::tie(out.inst, out.scen) = builtin_case(mode);
  out.model = assemble(out.inst, out.scen);
  out.sol = solve_milp(out.model);
  if (out.sol.status != MilpStatus::optimal) {
    note("solve status: %s", to_string(out.sol.status));
    return false;
  }
  out.lmps = extract_lmps(out.model, out.sol.pricing, out.scen);
  return true;
}

// criterion 1: single forecast-matching scenario behaves like a pure
// day-ahead problem
void criterion1() {
  Timer timer;
  bool pass = true;
  SolvedCase c;
  if (!solve_builtin(CaseMode::deterministic, c)) {
    report(1, "deterministic collapse", false, timer.seconds());
    return;
  }
  const int T = c.inst.horizon.count();
  const int nb = c.inst.network.bus_count();

  double max_rt = 0.0;
  for (int w = 0; w < c.scen.count(); ++w)
    for (int t = 0; t < T; ++t) {
      max_rt = std::max(max_rt,
                        std::abs(c.sol.x[c.model.index.at({VarKind::rt_buy, -1, -1, t, w})]));
      max_rt = std::max(max_rt,
                        std::abs(c.sol.x[c.model.index.at({VarKind::rt_sell, -1, -1, t, w})]));
      max_rt = std::max(max_rt,
                        std::abs(c.sol.x[c.model.index.at({VarKind::rt_sub_q, -1, -1, t, w})]));
      max_rt = std::max(max_rt,
                        std::abs(c.sol.x[c.model.index.at({VarKind::reag_spill, 0, -1, t, w})]));
      for (int j = 0; j < c.inst.network.branch_count(); ++j) {
        const double d =
            c.sol.x[c.model.index.at({VarKind::rt_flow_p, j, -1, t, w})] -
            c.sol.x[c.model.index.at({VarKind::flow_p, j, -1, t, -1})];
        max_rt = std::max(max_rt, std::abs(d));
      }
    }
  if (max_rt > 1e-7) {
    note("max real-time adjustment %.3e exceeds 1e-7", max_rt);
    pass = false;
  }

  // pure day-ahead model: no scenarios at all
  Model pure = assemble(c.inst, ScenarioSet{});
  MilpSolution pure_sol = solve_milp(pure);
  if (pure_sol.status != MilpStatus::optimal) {
    note("pure day-ahead solve failed");
    pass = false;
  } else if (std::abs(pure_sol.objective - c.sol.objective) > 1e-6) {
    note("objective %.9f vs pure day-ahead %.9f", c.sol.objective,
         pure_sol.objective);
    pass = false;
  }

  double max_gap = 0.0;
  for (int t = 0; t < T; ++t)
    for (int n = 0; n < nb; ++n)
      max_gap = std::max(max_gap, std::abs(c.lmps.rt[0](t, n) - c.lmps.da(t, n)));
  if (max_gap > 1e-6) {
    note("max |rt - da| price gap %.3e exceeds 1e-6", max_gap);
    pass = false;
  }
  const double secs = timer.seconds();
  if (secs >= 5.0) {
    note("runtime %.1fs exceeds 5s", secs);
    pass = false;
  }
  report(1, "deterministic collapse", pass, secs);
}

// criterion 2: discrete renewable table settlement signs
void criterion2() {
  Timer timer;
  bool pass = true;
  SolvedCase c;
  if (!solve_builtin(CaseMode::single_uncertainty, c)) {
    report(2, "single-uncertainty settlement", false, timer.seconds());
    return;
  }
  SettlementReport rep = settle(c.model, c.sol, c.lmps, c.scen);
  const AggregatorSettlement* reag = nullptr;
  for (const AggregatorSettlement& a : rep.aggregators)
    if (a.kind == "reag") reag = &a;
  if (reag == nullptr || reag->rt_revenue.size() != 5) {
    note("missing renewable settlement");
    pass = false;
  } else {
    if (std::abs(reag->rt_revenue[2]) > 1e-6) {
      note("forecast-scenario revenue %.3e not zero", reag->rt_revenue[2]);
      pass = false;
    }
    for (int w : {0, 1, 3, 4})
      if (!(reag->rt_revenue[w] < 0.0)) {
        note("scenario %d revenue %.6f not negative", w + 1, reag->rt_revenue[w]);
        pass = false;
      }
  }
  const double secs = timer.seconds();
  if (secs >= 10.0) {
    note("runtime %.1fs exceeds 10s", secs);
    pass = false;
  }
  report(2, "single-uncertainty settlement", pass, secs);
}

// criterion 3: comonotone scenarios price at the real-time sell/buy prices
void criterion3() {
  Timer timer;
  bool pass = true;
  SolvedCase c;
  if (!solve_builtin(CaseMode::multi_uncertainty, c)) {
    report(3, "multi-uncertainty real-time prices", false, timer.seconds());
    return;
  }
  const int T = c.inst.horizon.count();
  const int nb = c.inst.network.bus_count();
  for (int w = 0; w < 7; ++w) {
    if (w == 3) continue;  // balanced scenario carries a degenerate price
    const VectorXd& ref =
        w < 3 ? c.scen.scenarios[w].rt_sell : c.scen.scenarios[w].rt_buy;
    for (int t = 0; t < T; ++t)
      for (int n = 0; n < nb; ++n) {
        const double gap = std::abs(c.lmps.rt[w](t, n) - ref[t]);
        if (gap > 1e-6) {
          note("scenario %d hour %d bus %d gap %.3e", w + 1, t + 1, n + 1, gap);
          pass = false;
        }
      }
  }
  const double secs = timer.seconds();
  if (secs >= 20.0) {
    note("runtime %.1fs exceeds 20s", secs);
    pass = false;
  }
  report(3, "multi-uncertainty real-time prices", pass, secs);
}

// criterion 4: branch-and-bound equals exhaustive enumeration
void criterion4() {
  Timer timer;
  bool pass = true;
  for (CaseMode mode : {CaseMode::deterministic, CaseMode::single_uncertainty,
                        CaseMode::multi_uncertainty}) {
    auto [inst24, scen24] = builtin_case(mode);
    for (int T : {2, 3, 4}) {
      Instance inst = truncate_horizon(inst24, T);
      ScenarioSet scen = build_scenarios(inst, mode);
      Model m = assemble(inst, scen);
      if (static_cast<int>(m.binary_columns().size()) > 9) {
        note("unexpected binary count %zu", m.binary_columns().size());
        pass = false;
        continue;
      }
      MilpSolution bb = solve_milp(m);
      MilpSolution bf = brute_force_milp(m);
      if (bb.status != MilpStatus::optimal || bf.status != MilpStatus::optimal) {
        note("%s T=%d statuses %s / %s", to_string(mode), T, to_string(bb.status),
             to_string(bf.status));
        pass = false;
        continue;
      }
      if (std::abs(bb.objective - bf.objective) > 1e-6) {
        note("%s T=%d objective %.9f vs oracle %.9f", to_string(mode), T,
             bb.objective, bf.objective);
        pass = false;
      }
    }
  }
  report(4, "branch-and-bound matches enumeration", pass, timer.seconds());
}

// criterion 5: LP kernel certificates on random instances
void criterion5() {
  Timer timer;
  bool pass = true;
  std::mt19937 rng(424242);
  int vertex_checked = 0;
  for (int k = 0; k < 200; ++k) {
    int m, n;
    if (k % 5 == 0) {  // small instances, oracle-checked
      m = 2 + static_cast<int>(rng() % 7);
      n = 2 + static_cast<int>(rng() % 7);
    } else {
      m = 5 + static_cast<int>(rng() % 26);  // up to 30
      n = 5 + static_cast<int>(rng() % 36);  // up to 40
    }
    BoundedLp lp = lptest::random_lp(rng, m, n);
    LpSolution s = solve_lp(lp);
    if (s.status != LpStatus::optimal) {
      note("instance %d (%dx%d) status %s", k, m, n, to_string(s.status));
      pass = false;
      continue;
    }
    auto rep = lptest::check_certificates(lp, s);
    if (rep.duality_gap > 1e-6 || rep.comp_slack > 1e-6 ||
        rep.primal_violation > 1e-7 || rep.dual_sign_violation > 1e-7) {
      note("instance %d (%dx%d) gap %.2e cs %.2e primal %.2e sign %.2e", k, m, n,
           rep.duality_gap, rep.comp_slack, rep.primal_violation,
           rep.dual_sign_violation);
      pass = false;
    }
    if (m <= 8 && n <= 8) {
      auto oracle = lptest::vertex_enumeration(lp);
      ++vertex_checked;
      if (!oracle.feasible ||
          std::abs(s.objective - oracle.objective) > 1e-6 * (1 + std::abs(s.objective))) {
        note("instance %d (%dx%d) vertex oracle %.9f vs %.9f", k, m, n,
             oracle.objective, s.objective);
        pass = false;
      }
    }
  }
  note("200 instances, %d vertex-checked", vertex_checked);
  report(5, "LP kernel soundness", pass, timer.seconds());
}

// criterion 6: physical invariants on every solved builtin case
void criterion6() {
  Timer timer;
  bool pass = true;
  for (CaseMode mode : {CaseMode::deterministic, CaseMode::single_uncertainty,
                        CaseMode::multi_uncertainty}) {
    SolvedCase c;
    if (!solve_builtin(mode, c)) {
      pass = false;
      continue;
    }
    PhysicsReport rep = audit_solution(c.model, c.scen, c.sol.x, 1e-6);
    if (!rep.ok()) {
      for (const std::string& v : rep.violations)
        note("%s: %s", to_string(mode), v.c_str());
      pass = false;
    }
  }
  report(6, "physical invariants", pass, timer.seconds());
}

// criterion 7: raising real-time prices drives the schedule to the worst case
void criterion7() {
  Timer timer;
  bool pass = true;
  auto [inst, scen] = builtin_case(CaseMode::single_uncertainty);
  std::vector<double> multipliers;
  for (int i = 1; i <= 25; ++i) multipliers.push_back(i);
  SweepSeries series = sensitivity_sweep(inst, CaseMode::single_uncertainty,
                                         multipliers, SweepMode::rt_premium_scale);
  if (series.records.size() != 25) {
    note("expected 25 records, got %zu", series.records.size());
    pass = false;
  }
  int istar = -1;
  for (int i = 0; i < static_cast<int>(series.records.size()); ++i) {
    const SweepRecord& r = series.records[i];
    if (!r.solved) {
      note("case i=%g failed: %s", r.multiplier, r.error.c_str());
      pass = false;
      continue;
    }
    if (std::abs(r.reag_expected_rt_revenue) <= 1e-6) {
      if (istar < 0) istar = i + 1;
    } else if (istar >= 0) {
      note("revenue magnitude regressed at i=%g after reaching zero at i=%d",
           r.multiplier, istar);
      pass = false;
    }
  }
  if (istar < 0) {
    note("expected real-time revenue never reaches zero");
    pass = false;
  } else {
    note("expected revenue reaches zero from i*=%d", istar);
  }
  if (!series.records.empty()) {
    const SweepRecord& last = series.records.back();
    if (last.reag_da_schedule_max_mw > 1.0 + 1e-6) {
      note("schedule at i=25 peaks at %.6f MW, above worst-case availability",
           last.reag_da_schedule_max_mw);
      pass = false;
    }
  }
  const double secs = timer.seconds();
  if (secs >= 180.0) {
    note("runtime %.1fs exceeds 180s", secs);
    pass = false;
  }
  report(7, "sensitivity limit behavior", pass, secs);
}

// criterion 8: uncongested uniformity, congestion separates prices
void criterion8() {
  Timer timer;
  bool pass = true;
  {
    auto [inst, scen] = builtin_case(CaseMode::deterministic);
    inst.network.pl_max = 200.0;  // at least 10x any flow in this case
    inst.network.ql_max = 200.0;
    ScenarioSet sc = deterministic_scenarios(inst);
    Model m = assemble(inst, sc);
    MilpSolution sol = solve_milp(m);
    if (sol.status != MilpStatus::optimal) {
      note("uncongested solve failed");
      pass = false;
    } else {
      LmpSurface lmps = extract_lmps(m, sol.pricing, sc);
      for (int t = 0; t < inst.horizon.count(); ++t) {
        const double spread =
            lmps.da.row(t).maxCoeff() - lmps.da.row(t).minCoeff();
        if (spread > 1e-6) {
          note("hour %d uncongested spread %.3e", t + 1, spread);
          pass = false;
        }
      }
    }
  }
  {
    auto [inst, scen] = builtin_case(CaseMode::deterministic);
    inst.network.branches[3].pl_max = 1.0;  // line 4 feeds the load bus
    ScenarioSet sc = deterministic_scenarios(inst);
    Model m = assemble(inst, sc);
    MilpSolution sol = solve_milp(m);
    if (sol.status != MilpStatus::optimal) {
      note("congested solve failed: %s", to_string(sol.status));
      pass = false;
    } else {
      LmpSurface lmps = extract_lmps(m, sol.pricing, sc);
      const int b1 = inst.network.bus_position(1);
      const int b5 = inst.network.bus_position(5);
      double max_sep = 0.0;
      for (int t = 0; t < inst.horizon.count(); ++t)
        max_sep = std::max(max_sep, std::abs(lmps.da(t, b5) - lmps.da(t, b1)));
      if (max_sep <= 1e-6) {
        note("congestion did not separate prices (max separation %.3e)", max_sep);
        pass = false;
      } else {
        note("max bus5-bus1 separation %.3f $/MWh", max_sep);
      }
    }
  }
  report(8, "congestion pricing", pass, timer.seconds());
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  if (failures == 0) {
    std::printf("all criteria passed\n");
    return 0;
  }
  std::printf("%d criteria failed\n", failures);
  return 1;
}

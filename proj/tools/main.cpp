// Command-line front end: solve a case and emit CSV artifacts, run the
// real-time price sensitivity sweep, or inspect an instance.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "dsom/audit.hpp"
#include "dsom/instance.hpp"
#include "dsom/lp_format.hpp"
#include "dsom/milp.hpp"
#include "dsom/pricing.hpp"
#include "dsom/scenario.hpp"

namespace fs = std::filesystem;
using namespace dsom;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitBreakdown = 3;

struct CommonArgs {
  std::string builtin_mode;
  std::string instance_path;
  std::string scenario_mode = "deterministic";
  std::string out_dir = ".";
  bool export_lp = false;
  double tol_feas = 1e-7;
  double tol_opt = 1e-7;
  double tol_int = 1e-6;
  double tol_gap = 1e-6;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_out) {
  cmd->add_option("--builtin", args.builtin_mode,
                  "builtin case: deterministic | single-uncertainty | "
                  "multi-uncertainty");
  cmd->add_option("--instance", args.instance_path, "instance file path");
  cmd->add_option("--scenario-mode", args.scenario_mode,
                  "scenario mode for --instance runs (default deterministic)");
  if (with_out) {
    cmd->add_option("--out", args.out_dir, "output directory");
    cmd->add_flag("--export-lp", args.export_lp, "also write model.lp");
  }
  cmd->add_option("--tol-feas", args.tol_feas, "LP feasibility tolerance");
  cmd->add_option("--tol-opt", args.tol_opt, "LP optimality tolerance");
  cmd->add_option("--tol-int", args.tol_int, "branch-and-bound integrality tolerance");
  cmd->add_option("--tol-gap", args.tol_gap, "branch-and-bound absolute gap");
}

MilpOptions options_from(const CommonArgs& args) {
  MilpOptions opts;
  opts.lp.feas_tol = args.tol_feas;
  opts.lp.opt_tol = args.tol_opt;
  opts.int_tol = args.tol_int;
  opts.abs_gap = args.tol_gap;
  return opts;
}

// loads the case; returns nonzero exit code on failure
int load_case(const CommonArgs& args, Instance& inst, ScenarioSet& scen,
              CaseMode& mode) {
  if (args.builtin_mode.empty() == args.instance_path.empty()) {
    std::cerr << "error: exactly one of --builtin or --instance is required\n";
    return kExitConfig;
  }
  if (!args.builtin_mode.empty()) {
    if (!case_mode_from_string(args.builtin_mode, mode)) {
      std::cerr << "error: unknown builtin mode '" << args.builtin_mode << "'\n";
      return kExitConfig;
    }
    std::tie(inst, scen) = builtin_case(mode);
    return kExitOk;
  }
  if (!fs::exists(args.instance_path)) {
    std::cerr << "error: instance file not found: " << args.instance_path << "\n";
    return kExitConfig;
  }
  std::ifstream in(args.instance_path);
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    inst = parse_instance(buf.str());
  } catch (const ParseError& e) {
    std::cerr << "error: " << args.instance_path << ": " << e.what() << "\n";
    return kExitConfig;
  }
  if (!case_mode_from_string(args.scenario_mode, mode)) {
    std::cerr << "error: unknown scenario mode '" << args.scenario_mode << "'\n";
    return kExitConfig;
  }
  const ValidationReport rep = validate_instance(inst);
  if (!rep.ok()) {
    std::cerr << "error: instance validation failed:\n" << rep.to_string();
    return kExitConfig;
  }
  scen = build_scenarios(inst, mode);
  return kExitOk;
}

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream os(path, std::ios::binary);
  os << contents;
}

int cmd_run(const CommonArgs& args) {
  Instance inst;
  ScenarioSet scen;
  CaseMode mode{};
  if (int rc = load_case(args, inst, scen, mode)) return rc;

  const ValidationReport vrep = validate_instance(inst);
  if (!vrep.ok()) {
    std::cerr << "error: validation failed:\n" << vrep.to_string();
    return kExitConfig;
  }

  fs::create_directories(args.out_dir);
  const auto t0 = std::chrono::steady_clock::now();
  Model model = assemble(inst, scen);
  const MilpOptions opts = options_from(args);
  MilpSolution sol = solve_milp(model, opts);
  const auto t1 = std::chrono::steady_clock::now();
  const double wall_ms =
      std::chrono::duration<double, std::milli>(t1 - t0).count();

  if (sol.status == MilpStatus::infeasible) {
    std::cerr << "infeasible";
    if (!sol.infeasible_hint.empty())
      std::cerr << " (first violated row: " << sol.infeasible_hint << ")";
    std::cerr << "\n";
    return kExitInfeasible;
  }
  if (sol.status != MilpStatus::optimal) {
    std::cerr << "solver failure: " << to_string(sol.status) << "\n";
    return kExitBreakdown;
  }

  const LmpSurface lmps = extract_lmps(model, sol.pricing, scen);
  const SettlementReport rep = settle(model, sol, lmps, scen);
  const PhysicsReport phys = audit_solution(model, scen, sol.x);

  const fs::path out(args.out_dir);
  {
    std::ostringstream os;
    write_solution_csv(os, model, sol.x);
    write_file(out / "solution.csv", os.str());
  }
  {
    std::ostringstream os;
    write_lmps_da_csv(os, model, lmps);
    write_file(out / "lmps_da.csv", os.str());
  }
  {
    std::ostringstream os;
    write_lmps_rt_csv(os, model, lmps, scen);
    write_file(out / "lmps_rt.csv", os.str());
  }
  {
    std::ostringstream os;
    write_settlement_csv(os, rep, scen);
    write_file(out / "settlement.csv", os.str());
  }
  if (args.export_lp) {
    std::ostringstream os;
    write_lp_file(os, model);
    write_file(out / "model.lp", os.str());
  }

  json manifest;
  manifest["instance_hash"] = instance_hash(inst);
  manifest["scenario_mode"] = to_string(mode);
  manifest["scenarios"] = scen.count();
  manifest["objective"] = sol.objective;
  manifest["solver"] = {{"status", to_string(sol.status)},
                        {"nodes", sol.node_count},
                        {"lp_iterations", sol.lp_iterations},
                        {"wall_ms", wall_ms}};
  manifest["tolerances"] = {{"feas", args.tol_feas},
                            {"opt", args.tol_opt},
                            {"integrality", args.tol_int},
                            {"gap", args.tol_gap}};
  manifest["physics"] = {{"ok", phys.ok()},
                         {"max_active_balance", phys.max_active_balance},
                         {"max_rt_active_balance", phys.max_rt_active_balance},
                         {"max_storage_residual", phys.max_storage_residual}};
  manifest["defaults"] = json::object();
  for (const auto& [key, src] : inst.provenance) manifest["defaults"][key] = src;
  manifest["outputs"] = {"solution.csv", "lmps_da.csv", "lmps_rt.csv",
                         "settlement.csv"};
  write_file(out / "manifest.json", manifest.dump(2) + "\n");

  std::cout << "status " << to_string(sol.status) << ", objective "
            << sol.objective << ", nodes " << sol.node_count << ", " << wall_ms
            << " ms\n";
  if (!phys.ok()) {
    std::cerr << "warning: physics audit reported violations\n";
    for (const std::string& v : phys.violations) std::cerr << "  " << v << "\n";
  }
  return kExitOk;
}

int cmd_sweep(const CommonArgs& args, const std::string& sweep_range,
              const std::string& sweep_mode) {
  Instance inst;
  ScenarioSet scen;
  CaseMode mode{};
  if (int rc = load_case(args, inst, scen, mode)) return rc;

  // range "a..b" or comma list
  std::vector<double> multipliers;
  const auto dots = sweep_range.find("..");
  if (dots != std::string::npos) {
    const int a = std::stoi(sweep_range.substr(0, dots));
    const int b = std::stoi(sweep_range.substr(dots + 2));
    for (int i = a; i <= b; ++i) multipliers.push_back(i);
  } else {
    std::stringstream ss(sweep_range);
    std::string item;
    while (std::getline(ss, item, ',')) multipliers.push_back(std::stod(item));
  }
  if (multipliers.empty()) {
    std::cerr << "error: empty sweep range\n";
    return kExitConfig;
  }
  for (double i : multipliers)
    if (!(i > 0.0)) {
      std::cerr << "error: sweep multipliers must be positive\n";
      return kExitConfig;
    }
  SweepMode smode;
  if (sweep_mode == "rt_premium") smode = SweepMode::rt_premium_scale;
  else if (sweep_mode == "spread") smode = SweepMode::sell_buy_spread_scale;
  else {
    std::cerr << "error: unknown sweep mode '" << sweep_mode << "'\n";
    return kExitConfig;
  }

  const SweepSeries series =
      sensitivity_sweep(inst, mode, multipliers, smode, options_from(args));
  fs::create_directories(args.out_dir);
  std::ostringstream os;
  write_sweep_csv(os, series);
  write_file(fs::path(args.out_dir) / "sweep.csv", os.str());

  int failures = 0;
  for (const SweepRecord& r : series.records)
    if (!r.solved) ++failures;
  std::cout << series.records.size() << " cases, " << failures << " failures\n";
  return failures == 0 ? kExitOk : kExitBreakdown;
}

int cmd_inspect(const CommonArgs& args) {
  Instance inst;
  ScenarioSet scen;
  CaseMode mode{};
  if (int rc = load_case(args, inst, scen, mode)) return rc;

  std::cout << "instance hash " << instance_hash(inst) << "\n";
  std::cout << "buses " << inst.network.bus_count() << ", branches "
            << inst.network.branch_count() << ", hours "
            << inst.horizon.count() << "\n";
  std::cout << "aggregators: drag " << inst.drags.size() << ", esag "
            << inst.esags.size() << ", evcs " << inst.evcss.size() << ", ddgag "
            << inst.ddgags.size() << ", reag " << inst.reags.size() << "\n";

  Model model = assemble(inst, scen);
  std::cout << "model: " << model.lp.rows() << " rows, " << model.lp.cols()
            << " columns, " << model.lp.A.nonZeros() << " nonzeros, "
            << model.binary_columns().size() << " binaries\n\n";

  std::cout << "scenario table (" << to_string(mode) << "):\n";
  std::cout << "  w  prob        reag_cap(t0)  load_p(t0)  rt_buy(t0)  rt_sell(t0)\n";
  for (const Scenario& s : scen.scenarios) {
    double cap = 0.0;
    for (int k = 0; k < s.reag_cap.cols(); ++k) cap += s.reag_cap(0, k);
    std::printf("  %-2d %-10.6g  %-12.6g  %-10.6g  %-10.6g  %-10.6g\n", s.id,
                s.probability, cap, s.load_p.row(0).sum(), s.rt_buy[0],
                s.rt_sell[0]);
  }

  std::cout << "\nparameter provenance:\n";
  for (const auto& [key, src] : inst.provenance)
    std::cout << "  " << key << ": " << src << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"two-stage DER aggregator market clearing"};
  app.require_subcommand(1);

  CommonArgs run_args, sweep_args, inspect_args;
  std::string sweep_range = "1..25";
  std::string sweep_mode = "rt_premium";

  CLI::App* run = app.add_subcommand("run", "solve a case and write CSV artifacts");
  add_common(run, run_args, true);
  CLI::App* sweep =
      app.add_subcommand("sweep", "real-time price sensitivity sweep");
  add_common(sweep, sweep_args, true);
  sweep->add_option("--sweep", sweep_range, "multiplier range a..b or list");
  sweep->add_option("--sweep-mode", sweep_mode, "rt_premium | spread");
  CLI::App* inspect =
      app.add_subcommand("inspect", "print scenario table, sizes and defaults");
  add_common(inspect, inspect_args, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) ? kExitConfig : kExitOk;
  }

  try {
    if (run->parsed()) return cmd_run(run_args);
    if (sweep->parsed()) return cmd_sweep(sweep_args, sweep_range, sweep_mode);
    if (inspect->parsed()) return cmd_inspect(inspect_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBreakdown;
  }
  return kExitConfig;
}

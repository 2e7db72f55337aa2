#include "dsom/instance.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include <json.hpp>

#include "defaults.hpp"

namespace dsom {

using nlohmann::json;

const char* to_string(CaseMode mode) {
  switch (mode) {
    case CaseMode::deterministic: return "deterministic";
    case CaseMode::single_uncertainty: return "single-uncertainty";
    case CaseMode::multi_uncertainty: return "multi-uncertainty";
  }
  return "unknown";
}

bool case_mode_from_string(const std::string& s, CaseMode& out) {
  if (s == "deterministic") out = CaseMode::deterministic;
  else if (s == "single-uncertainty") out = CaseMode::single_uncertainty;
  else if (s == "multi-uncertainty") out = CaseMode::multi_uncertainty;
  else return false;
  return true;
}

std::string ValidationReport::to_string() const {
  std::ostringstream os;
  for (const Finding& f : findings) os << f.path << ": " << f.message << "\n";
  return os.str();
}

namespace {

// ---- parsing helpers ----------------------------------------------------

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw ParseError(path, msg);
}

const json* maybe(const json& obj, const std::string& key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

double need_number(const json& obj, const std::string& path, const std::string& key) {
  const json* v = maybe(obj, key);
  if (!v || !v->is_number()) fail(path + "/" + key, "expected a number");
  return v->get<double>();
}

double opt_number(const json& obj, const std::string& key, double dflt,
                  Instance& inst, const std::string& prov_key) {
  const json* v = maybe(obj, key);
  if (v && v->is_number()) return v->get<double>();
  inst.provenance[prov_key] = "default";
  return dflt;
}

int need_int(const json& obj, const std::string& path, const std::string& key) {
  const json* v = maybe(obj, key);
  if (!v || !v->is_number_integer()) fail(path + "/" + key, "expected an integer");
  return v->get<int>();
}

std::string need_string(const json& obj, const std::string& path,
                        const std::string& key) {
  const json* v = maybe(obj, key);
  if (!v || !v->is_string()) fail(path + "/" + key, "expected a string");
  return v->get<std::string>();
}

// A series is either a scalar (broadcast over the horizon) or an array of
// exactly T numbers.
VectorXd parse_series(const json& v, const std::string& path, int T) {
  if (v.is_number()) return VectorXd::Constant(T, v.get<double>());
  if (v.is_array()) {
    if (static_cast<int>(v.size()) != T)
      fail(path, "series length " + std::to_string(v.size()) +
                     " does not match horizon length " + std::to_string(T));
    VectorXd out(T);
    for (int t = 0; t < T; ++t) {
      if (!v[t].is_number()) fail(path, "series entries must be numbers");
      out[t] = v[t].get<double>();
    }
    return out;
  }
  fail(path, "expected a number or an array");
}

VectorXd opt_series(const json& obj, const std::string& key, const std::string& path,
                    int T, const VectorXd& dflt, Instance& inst,
                    const std::string& prov_key) {
  const json* v = maybe(obj, key);
  if (v) return parse_series(*v, path + "/" + key, T);
  inst.provenance[prov_key] = "default";
  return dflt;
}

RegPrices parse_reg(const json& obj, const std::string& path, int T,
                    const RegPrices& dflt, Instance& inst,
                    const std::string& prov_key) {
  RegPrices out;
  out.cap_up = opt_series(obj, "cap_up_price", path, T, dflt.cap_up, inst,
                          prov_key + ".cap_up_price");
  out.cap_dn = opt_series(obj, "cap_dn_price", path, T, dflt.cap_dn, inst,
                          prov_key + ".cap_dn_price");
  out.mil_up = opt_series(obj, "mil_up_price", path, T, dflt.mil_up, inst,
                          prov_key + ".mil_up_price");
  out.mil_dn = opt_series(obj, "mil_dn_price", path, T, dflt.mil_dn, inst,
                          prov_key + ".mil_dn_price");
  return out;
}

json series_json(const VectorXd& v) {
  json arr = json::array();
  for (int t = 0; t < v.size(); ++t) arr.push_back(v[t]);
  return arr;
}

json reg_json(const RegPrices& r) {
  return {{"cap_up_price", series_json(r.cap_up)},
          {"cap_dn_price", series_json(r.cap_dn)},
          {"mil_up_price", series_json(r.mil_up)},
          {"mil_dn_price", series_json(r.mil_dn)}};
}

}  // namespace

Instance parse_instance(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("byte " + std::to_string(e.byte), e.what());
  }
  if (!doc.is_object()) fail("/", "instance document must be an object");

  Instance inst;

  // horizon
  const json* hz = maybe(doc, "horizon");
  if (!hz) fail("/horizon", "missing");
  const json* hours = maybe(*hz, "hours");
  if (!hours || !hours->is_array() || hours->empty())
    fail("/horizon/hours", "expected a non-empty array");
  for (const auto& h : *hours) {
    if (!h.is_number_integer()) fail("/horizon/hours", "hour labels must be integers");
    inst.horizon.hours.push_back(h.get<int>());
  }
  const int T = inst.horizon.count();

  // network
  const json* net = maybe(doc, "network");
  if (!net) fail("/network", "missing");
  const json* buses = maybe(*net, "buses");
  if (!buses || !buses->is_array() || buses->empty())
    fail("/network/buses", "expected a non-empty array");
  for (const auto& b : *buses) inst.network.buses.push_back(b.get<int>());
  inst.network.substation_bus = need_int(*net, "/network", "substation_bus");
  inst.network.v_min =
      opt_number(*net, "v_min", defaults::kVMin, inst, "network.v_min");
  inst.network.v_max =
      opt_number(*net, "v_max", defaults::kVMax, inst, "network.v_max");
  inst.network.pl_max =
      opt_number(*net, "pl_max_mw", defaults::kPlMax, inst, "network.pl_max_mw");
  inst.network.ql_max =
      opt_number(*net, "ql_max_mvar", defaults::kQlMax, inst, "network.ql_max_mvar");
  inst.network.s_base_mva =
      opt_number(*net, "s_base_mva", defaults::kSBase, inst, "network.s_base_mva");
  const json* branches = maybe(*net, "branches");
  if (!branches || !branches->is_array()) fail("/network/branches", "missing");
  int bi = 0;
  for (const auto& br : *branches) {
    const std::string path = "/network/branches/" + std::to_string(bi++);
    Branch out;
    out.id = need_int(br, path, "id");
    out.from_bus = need_int(br, path, "from");
    out.to_bus = need_int(br, path, "to");
    out.r = br.contains("r_pu") ? need_number(br, path, "r_pu") : defaults::kLineR;
    out.x = br.contains("x_pu") ? need_number(br, path, "x_pu") : defaults::kLineX;
    if (!br.contains("r_pu"))
      inst.provenance["network.branch" + std::to_string(out.id) + ".r_pu"] = "default";
    if (!br.contains("x_pu"))
      inst.provenance["network.branch" + std::to_string(out.id) + ".x_pu"] = "default";
    if (br.contains("pl_max_mw")) out.pl_max = need_number(br, path, "pl_max_mw");
    if (br.contains("ql_max_mvar")) out.ql_max = need_number(br, path, "ql_max_mvar");
    inst.network.branches.push_back(out);
  }

  // aggregators
  const json agg = doc.contains("aggregators") ? doc["aggregators"] : json::object();
  int i = 0;
  for (const auto& d : agg.value("drag", json::array())) {
    const std::string path = "/aggregators/drag/" + std::to_string(i);
    DragSpec s;
    s.id = need_string(d, path, "id");
    s.bus = need_int(d, path, "bus");
    s.r_up_max = need_number(d, path, "r_up_max_mw");
    s.r_dn_max = need_number(d, path, "r_dn_max_mw");
    s.tan_phi = opt_number(d, "tan_phi", defaults::tan_phi(), inst, s.id + ".tan_phi");
    const json* blocks = maybe(d, "blocks");
    if (!blocks || !blocks->is_array() || blocks->empty())
      fail(path + "/blocks", "expected a non-empty array");
    int a = 0;
    for (const auto& blk : *blocks) {
      DragBlock out;
      out.p_max = need_number(blk, path + "/blocks/" + std::to_string(a), "p_max_mw");
      const json* bid = maybe(blk, "bid");
      if (!bid) fail(path + "/blocks/" + std::to_string(a) + "/bid", "missing");
      out.bid = parse_series(*bid, path + "/blocks/" + std::to_string(a) + "/bid", T);
      s.blocks.push_back(std::move(out));
      ++a;
    }
    s.reg = parse_reg(d, path, T, defaults::drag_reg(T), inst, s.id);
    inst.drags.push_back(std::move(s));
    ++i;
  }
  i = 0;
  for (const auto& d : agg.value("esag", json::array())) {
    const std::string path = "/aggregators/esag/" + std::to_string(i);
    EsagSpec s;
    s.id = need_string(d, path, "id");
    s.bus = need_int(d, path, "bus");
    s.e_min = need_number(d, path, "e_min_mwh");
    s.e_max = need_number(d, path, "e_max_mwh");
    s.e_init = need_number(d, path, "e_init_mwh");
    s.cr_max = need_number(d, path, "cr_max_mw");
    s.dr_max = need_number(d, path, "dr_max_mw");
    s.eta_ch = opt_number(d, "eta_ch", 1.0, inst, s.id + ".eta_ch");
    s.eta_di = opt_number(d, "eta_di", 1.0, inst, s.id + ".eta_di");
    const json* pe = maybe(d, "energy_price");
    if (!pe) fail(path + "/energy_price", "missing");
    s.price_energy = parse_series(*pe, path + "/energy_price", T);
    s.reg = parse_reg(d, path, T, defaults::esag_reg(T), inst, s.id);
    inst.esags.push_back(std::move(s));
    ++i;
  }
  i = 0;
  for (const auto& d : agg.value("evcs", json::array())) {
    const std::string path = "/aggregators/evcs/" + std::to_string(i);
    EvcsSpec s;
    s.id = need_string(d, path, "id");
    s.bus = need_int(d, path, "bus");
    s.er_max = need_number(d, path, "er_max_mw");
    s.err_max = need_number(d, path, "err_max_mw");
    s.cl_max = opt_number(d, "cl_max_mwh", defaults::kEvcsClMax, inst,
                          s.id + ".cl_max_mwh");
    s.e_init = need_number(d, path, "e_init_mwh");
    s.gamma_ch = opt_number(d, "gamma_ch", 1.0, inst, s.id + ".gamma_ch");
    const json* win = maybe(d, "window_hours");
    if (!win || !win->is_array()) fail(path + "/window_hours", "missing");
    for (const auto& h : *win) s.window.push_back(h.get<int>());
    const json* pe = maybe(d, "energy_price");
    if (!pe) fail(path + "/energy_price", "missing");
    s.price_energy = parse_series(*pe, path + "/energy_price", T);
    s.reg = parse_reg(d, path, T, defaults::evcs_reg(T), inst, s.id);
    inst.evcss.push_back(std::move(s));
    ++i;
  }
  i = 0;
  for (const auto& d : agg.value("ddgag", json::array())) {
    const std::string path = "/aggregators/ddgag/" + std::to_string(i);
    DdgagSpec s;
    s.id = need_string(d, path, "id");
    s.bus = need_int(d, path, "bus");
    s.p_min = need_number(d, path, "p_min_mw");
    s.p_max = need_number(d, path, "p_max_mw");
    s.ru = need_number(d, path, "ru_mw");
    s.rd = need_number(d, path, "rd_mw");
    s.tan_phi = opt_number(d, "tan_phi", defaults::tan_phi(), inst, s.id + ".tan_phi");
    const json* pe = maybe(d, "energy_price");
    if (!pe) fail(path + "/energy_price", "missing");
    s.price_energy = parse_series(*pe, path + "/energy_price", T);
    s.reg = parse_reg(d, path, T, defaults::ddg_reg(T), inst, s.id);
    inst.ddgags.push_back(std::move(s));
    ++i;
  }
  i = 0;
  for (const auto& d : agg.value("reag", json::array())) {
    const std::string path = "/aggregators/reag/" + std::to_string(i);
    ReagSpec s;
    s.id = need_string(d, path, "id");
    s.bus = need_int(d, path, "bus");
    const json* fc = maybe(d, "p_forecast_max_mw");
    if (!fc) fail(path + "/p_forecast_max_mw", "missing");
    s.p_forecast_max = parse_series(*fc, path + "/p_forecast_max_mw", T);
    s.price_energy = opt_series(d, "energy_price", path, T,
                                VectorXd::Constant(T, 25.0), inst,
                                s.id + ".energy_price");
    inst.reags.push_back(std::move(s));
    ++i;
  }

  // wholesale prices
  const json prices = doc.contains("prices") ? doc["prices"] : json::object();
  if (!doc.contains("prices")) inst.provenance["prices"] = "default";
  inst.prices.da_energy = opt_series(prices, "da_energy", "/prices", T,
                                     defaults::da_energy(T), inst, "prices.da_energy");
  inst.prices.cap_up = opt_series(prices, "cap_up", "/prices", T,
                                  defaults::cap_up(T), inst, "prices.cap_up");
  inst.prices.cap_dn = opt_series(prices, "cap_dn", "/prices", T,
                                  defaults::cap_dn(T), inst, "prices.cap_dn");
  inst.prices.mil_up = opt_series(prices, "mil_up", "/prices", T,
                                  defaults::mil_up(T), inst, "prices.mil_up");
  inst.prices.mil_dn = opt_series(prices, "mil_dn", "/prices", T,
                                  defaults::mil_dn(T), inst, "prices.mil_dn");
  inst.prices.s_up = opt_series(prices, "s_up", "/prices", T,
                                defaults::mileage_ratio(T), inst, "prices.s_up");
  inst.prices.s_dn = opt_series(prices, "s_dn", "/prices", T,
                                defaults::mileage_ratio(T), inst, "prices.s_dn");
  inst.prices.mu_up = opt_series(prices, "mu_up", "/prices", T,
                                 defaults::performance_score(T), inst, "prices.mu_up");
  inst.prices.mu_dn = opt_series(prices, "mu_dn", "/prices", T,
                                 defaults::performance_score(T), inst, "prices.mu_dn");

  // loads: per-bus map, absent buses carry zero load
  const int nb = inst.network.bus_count();
  inst.loads.p = MatrixXd::Zero(T, nb);
  inst.loads.q = MatrixXd::Zero(T, nb);
  if (doc.contains("loads")) {
    const json& loads = doc["loads"];
    for (const char* part : {"p_mw", "q_mvar"}) {
      if (!loads.contains(part)) continue;
      for (const auto& [key, val] : loads[part].items()) {
        const int bus = std::stoi(key);
        const int pos = inst.network.bus_position(bus);
        if (pos < 0) fail(std::string("/loads/") + part + "/" + key, "unknown bus");
        const VectorXd series =
            parse_series(val, std::string("/loads/") + part + "/" + key, T);
        if (std::string(part) == "p_mw")
          inst.loads.p.col(pos) = series;
        else
          inst.loads.q.col(pos) = series;
      }
    }
  } else {
    inst.provenance["loads"] = "default";
  }

  // flags
  const json flags = doc.contains("flags") ? doc["flags"] : json::object();
  if (!doc.contains("flags")) inst.provenance["flags"] = "default";
  inst.flags.rt_sell_allowed = flags.value("rt_sell_allowed", true);
  inst.flags.rt_premium = flags.value("rt_premium", 0.0);
  inst.flags.rt_sell_ratio = flags.value("rt_sell_ratio", 0.8);
  inst.flags.evcs_eq23_strict = flags.value("evcs_eq23_strict", true);

  // a provenance section in the document wins over parse-derived entries
  if (doc.contains("provenance")) {
    inst.provenance.clear();
    for (const auto& [key, val] : doc["provenance"].items())
      inst.provenance[key] = val.get<std::string>();
  }

  // semantic checks that make the instance unusable, reported as errors
  for (const DragSpec& s : inst.drags)
    if (inst.network.bus_position(s.bus) < 0)
      fail("/aggregators/drag/" + s.id, "unknown bus " + std::to_string(s.bus));
  for (const EsagSpec& s : inst.esags)
    if (inst.network.bus_position(s.bus) < 0)
      fail("/aggregators/esag/" + s.id, "unknown bus " + std::to_string(s.bus));
  for (const EvcsSpec& s : inst.evcss)
    if (inst.network.bus_position(s.bus) < 0)
      fail("/aggregators/evcs/" + s.id, "unknown bus " + std::to_string(s.bus));
  for (const DdgagSpec& s : inst.ddgags)
    if (inst.network.bus_position(s.bus) < 0)
      fail("/aggregators/ddgag/" + s.id, "unknown bus " + std::to_string(s.bus));
  for (const ReagSpec& s : inst.reags)
    if (inst.network.bus_position(s.bus) < 0)
      fail("/aggregators/reag/" + s.id, "unknown bus " + std::to_string(s.bus));

  return inst;
}

std::string serialize_instance(const Instance& inst) {
  json doc;
  doc["horizon"]["hours"] = inst.horizon.hours;

  json net;
  net["buses"] = inst.network.buses;
  net["substation_bus"] = inst.network.substation_bus;
  net["v_min"] = inst.network.v_min;
  net["v_max"] = inst.network.v_max;
  net["pl_max_mw"] = inst.network.pl_max;
  net["ql_max_mvar"] = inst.network.ql_max;
  net["s_base_mva"] = inst.network.s_base_mva;
  net["branches"] = json::array();
  for (const Branch& b : inst.network.branches) {
    json jb = {{"id", b.id},
               {"from", b.from_bus},
               {"to", b.to_bus},
               {"r_pu", b.r},
               {"x_pu", b.x}};
    if (b.pl_max > 0.0) jb["pl_max_mw"] = b.pl_max;
    if (b.ql_max > 0.0) jb["ql_max_mvar"] = b.ql_max;
    net["branches"].push_back(jb);
  }
  doc["network"] = net;

  json agg;
  agg["drag"] = json::array();
  for (const DragSpec& s : inst.drags) {
    json d = {{"id", s.id},
              {"bus", s.bus},
              {"r_up_max_mw", s.r_up_max},
              {"r_dn_max_mw", s.r_dn_max},
              {"tan_phi", s.tan_phi}};
    d.update(reg_json(s.reg));
    d["blocks"] = json::array();
    for (const DragBlock& b : s.blocks)
      d["blocks"].push_back({{"p_max_mw", b.p_max}, {"bid", series_json(b.bid)}});
    agg["drag"].push_back(d);
  }
  agg["esag"] = json::array();
  for (const EsagSpec& s : inst.esags) {
    json d = {{"id", s.id},          {"bus", s.bus},
              {"e_min_mwh", s.e_min}, {"e_max_mwh", s.e_max},
              {"e_init_mwh", s.e_init}, {"cr_max_mw", s.cr_max},
              {"dr_max_mw", s.dr_max}, {"eta_ch", s.eta_ch},
              {"eta_di", s.eta_di},   {"energy_price", series_json(s.price_energy)}};
    d.update(reg_json(s.reg));
    agg["esag"].push_back(d);
  }
  agg["evcs"] = json::array();
  for (const EvcsSpec& s : inst.evcss) {
    json d = {{"id", s.id},
              {"bus", s.bus},
              {"er_max_mw", s.er_max},
              {"err_max_mw", s.err_max},
              {"cl_max_mwh", s.cl_max},
              {"e_init_mwh", s.e_init},
              {"gamma_ch", s.gamma_ch},
              {"window_hours", s.window},
              {"energy_price", series_json(s.price_energy)}};
    d.update(reg_json(s.reg));
    agg["evcs"].push_back(d);
  }
  agg["ddgag"] = json::array();
  for (const DdgagSpec& s : inst.ddgags) {
    json d = {{"id", s.id},        {"bus", s.bus},
              {"p_min_mw", s.p_min}, {"p_max_mw", s.p_max},
              {"ru_mw", s.ru},     {"rd_mw", s.rd},
              {"tan_phi", s.tan_phi},
              {"energy_price", series_json(s.price_energy)}};
    d.update(reg_json(s.reg));
    agg["ddgag"].push_back(d);
  }
  agg["reag"] = json::array();
  for (const ReagSpec& s : inst.reags) {
    agg["reag"].push_back({{"id", s.id},
                           {"bus", s.bus},
                           {"p_forecast_max_mw", series_json(s.p_forecast_max)},
                           {"energy_price", series_json(s.price_energy)}});
  }
  doc["aggregators"] = agg;

  json prices;
  prices["da_energy"] = series_json(inst.prices.da_energy);
  prices["cap_up"] = series_json(inst.prices.cap_up);
  prices["cap_dn"] = series_json(inst.prices.cap_dn);
  prices["mil_up"] = series_json(inst.prices.mil_up);
  prices["mil_dn"] = series_json(inst.prices.mil_dn);
  prices["s_up"] = series_json(inst.prices.s_up);
  prices["s_dn"] = series_json(inst.prices.s_dn);
  prices["mu_up"] = series_json(inst.prices.mu_up);
  prices["mu_dn"] = series_json(inst.prices.mu_dn);
  doc["prices"] = prices;

  json loads_p = json::object(), loads_q = json::object();
  for (int n = 0; n < inst.network.bus_count(); ++n) {
    const std::string key = std::to_string(inst.network.buses[n]);
    if (inst.loads.p.col(n).cwiseAbs().maxCoeff() > 0.0)
      loads_p[key] = series_json(inst.loads.p.col(n));
    if (inst.loads.q.col(n).cwiseAbs().maxCoeff() > 0.0)
      loads_q[key] = series_json(inst.loads.q.col(n));
  }
  doc["loads"] = {{"p_mw", loads_p}, {"q_mvar", loads_q}};

  doc["flags"] = {{"rt_sell_allowed", inst.flags.rt_sell_allowed},
                  {"rt_premium", inst.flags.rt_premium},
                  {"rt_sell_ratio", inst.flags.rt_sell_ratio},
                  {"evcs_eq23_strict", inst.flags.evcs_eq23_strict}};

  doc["provenance"] = inst.provenance;
  return doc.dump(2) + "\n";
}

bool instances_equal(const Instance& a, const Instance& b) {
  return serialize_instance(a) == serialize_instance(b);
}

std::string instance_hash(const Instance& inst) {
  const std::string s = serialize_instance(inst);
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

namespace {

void check_series(std::vector<Finding>& out, const VectorXd& v, int T,
                  const std::string& path) {
  if (static_cast<int>(v.size()) != T) {
    out.push_back({path, "series length does not match horizon"});
    return;
  }
  for (int t = 0; t < T; ++t)
    if (!std::isfinite(v[t])) {
      out.push_back({path, "non-finite value"});
      return;
    }
}

}  // namespace

ValidationReport validate_instance(const Instance& inst) {
  ValidationReport rep;
  auto add = [&](const std::string& path, const std::string& msg) {
    rep.findings.push_back({path, msg});
  };
  const int T = inst.horizon.count();

  if (T == 0) add("horizon.hours", "empty horizon");
  for (int t = 1; t < T; ++t)
    if (inst.horizon.hours[t] <= inst.horizon.hours[t - 1]) {
      add("horizon.hours", "hour labels must be strictly increasing");
      break;
    }

  // network
  const Network& net = inst.network;
  const int nb = net.bus_count();
  {
    std::set<int> uniq(net.buses.begin(), net.buses.end());
    if (static_cast<int>(uniq.size()) != nb) add("network.buses", "duplicate bus ids");
  }
  if (net.bus_position(net.substation_bus) < 0)
    add("network.substation_bus", "not a bus of the network");
  if (net.branch_count() != nb - 1)
    add("network.branches", "not radial: need exactly |buses|-1 branches");
  {
    // connectivity over the undirected branch graph
    std::vector<int> seen(nb, 0);
    std::vector<int> stack;
    if (nb > 0) {
      stack.push_back(0);
      seen[0] = 1;
    }
    while (!stack.empty()) {
      const int n = stack.back();
      stack.pop_back();
      for (const Branch& b : net.branches) {
        const int f = net.bus_position(b.from_bus);
        const int t2 = net.bus_position(b.to_bus);
        if (f < 0 || t2 < 0) continue;
        if (f == n && !seen[t2]) { seen[t2] = 1; stack.push_back(t2); }
        if (t2 == n && !seen[f]) { seen[f] = 1; stack.push_back(f); }
      }
    }
    for (int n = 0; n < nb; ++n)
      if (!seen[n]) {
        add("network", "not connected");
        break;
      }
  }
  for (const Branch& b : net.branches) {
    const std::string path = "network.branch" + std::to_string(b.id);
    if (net.bus_position(b.from_bus) < 0 || net.bus_position(b.to_bus) < 0)
      add(path, "references an unknown bus");
    if (b.r < 0.0 || b.x < 0.0) add(path, "negative impedance");
    if (b.pl_max < 0.0 || b.ql_max < 0.0) add(path, "negative flow limit");
  }
  if (!(net.v_min < net.v_max)) add("network.v_min", "v_min must be below v_max");
  if (!(net.pl_max > 0.0)) add("network.pl_max_mw", "must be positive");
  if (!(net.ql_max > 0.0)) add("network.ql_max_mvar", "must be positive");
  if (!(net.s_base_mva > 0.0)) add("network.s_base_mva", "must be positive");

  auto check_bus = [&](int bus, const std::string& path) {
    if (net.bus_position(bus) < 0) add(path, "unknown bus " + std::to_string(bus));
  };

  for (const DragSpec& s : inst.drags) {
    const std::string p = "drag." + s.id;
    check_bus(s.bus, p + ".bus");
    if (s.blocks.empty()) add(p + ".blocks", "no demand blocks");
    for (size_t a = 0; a < s.blocks.size(); ++a) {
      if (!(s.blocks[a].p_max > 0.0))
        add(p + ".blocks[" + std::to_string(a) + "].p_max_mw", "must be positive");
      check_series(rep.findings, s.blocks[a].bid, T,
                   p + ".blocks[" + std::to_string(a) + "].bid");
    }
    if (s.r_up_max < 0.0) add(p + ".r_up_max_mw", "must be >= 0");
    if (s.r_dn_max < 0.0) add(p + ".r_dn_max_mw", "must be >= 0");
  }
  for (const EsagSpec& s : inst.esags) {
    const std::string p = "esag." + s.id;
    check_bus(s.bus, p + ".bus");
    if (!(s.e_min <= s.e_init))
      add(p + ".e_init_mwh", "e_init below e_min");
    if (!(s.e_init <= s.e_max))
      add(p + ".e_init_mwh", "e_init exceeds e_max");
    if (!(s.cr_max > 0.0)) add(p + ".cr_max_mw", "must be positive");
    if (!(s.dr_max > 0.0)) add(p + ".dr_max_mw", "must be positive");
    if (!(s.eta_ch > 0.0 && s.eta_ch <= 1.0)) add(p + ".eta_ch", "must be in (0,1]");
    if (!(s.eta_di > 0.0 && s.eta_di <= 1.0)) add(p + ".eta_di", "must be in (0,1]");
    check_series(rep.findings, s.price_energy, T, p + ".energy_price");
  }
  for (const EvcsSpec& s : inst.evcss) {
    const std::string p = "evcs." + s.id;
    check_bus(s.bus, p + ".bus");
    if (!(s.e_init >= 0.0 && s.e_init <= s.cl_max))
      add(p + ".e_init_mwh", "must be within [0, cl_max]");
    if (!(s.er_max > 0.0)) add(p + ".er_max_mw", "must be positive");
    if (s.err_max < 0.0) add(p + ".err_max_mw", "must be >= 0");
    if (!(s.gamma_ch > 0.0 && s.gamma_ch <= 1.0)) add(p + ".gamma_ch", "must be in (0,1]");
    // window must be a contiguous run of known hours
    for (size_t k = 0; k < s.window.size(); ++k) {
      if (inst.horizon.position_of(s.window[k]) < 0) {
        add(p + ".window_hours", "hour not in horizon");
        break;
      }
      if (k > 0 && inst.horizon.position_of(s.window[k]) !=
                       inst.horizon.position_of(s.window[k - 1]) + 1) {
        add(p + ".window_hours", "window must be contiguous");
        break;
      }
    }
    check_series(rep.findings, s.price_energy, T, p + ".energy_price");
  }
  for (const DdgagSpec& s : inst.ddgags) {
    const std::string p = "ddgag." + s.id;
    check_bus(s.bus, p + ".bus");
    if (!(s.p_min >= 0.0)) add(p + ".p_min_mw", "must be >= 0");
    if (!(s.p_min <= s.p_max)) add(p + ".p_max_mw", "p_max below p_min");
    if (s.ru < 0.0) add(p + ".ru_mw", "must be >= 0");
    if (s.rd < 0.0) add(p + ".rd_mw", "must be >= 0");
    check_series(rep.findings, s.price_energy, T, p + ".energy_price");
  }
  for (const ReagSpec& s : inst.reags) {
    const std::string p = "reag." + s.id;
    check_bus(s.bus, p + ".bus");
    check_series(rep.findings, s.p_forecast_max, T, p + ".p_forecast_max_mw");
    if (s.p_forecast_max.size() == T && s.p_forecast_max.minCoeff() < 0.0)
      add(p + ".p_forecast_max_mw", "must be >= 0");
  }

  for (const auto& [name, series] :
       {std::pair<const char*, const VectorXd*>{"da_energy", &inst.prices.da_energy},
        {"cap_up", &inst.prices.cap_up},
        {"cap_dn", &inst.prices.cap_dn},
        {"mil_up", &inst.prices.mil_up},
        {"mil_dn", &inst.prices.mil_dn},
        {"s_up", &inst.prices.s_up},
        {"s_dn", &inst.prices.s_dn},
        {"mu_up", &inst.prices.mu_up},
        {"mu_dn", &inst.prices.mu_dn}})
    check_series(rep.findings, *series, T, std::string("prices.") + name);
  if (inst.prices.s_up.size() == T && inst.prices.s_up.minCoeff() < 0.0)
    add("prices.s_up", "must be >= 0");
  if (inst.prices.s_dn.size() == T && inst.prices.s_dn.minCoeff() < 0.0)
    add("prices.s_dn", "must be >= 0");
  for (const char* which : {"mu_up", "mu_dn"}) {
    const VectorXd& mu =
        std::string(which) == "mu_up" ? inst.prices.mu_up : inst.prices.mu_dn;
    if (mu.size() == T && (mu.minCoeff() < 0.0 || mu.maxCoeff() > 1.0))
      add(std::string("prices.") + which, "must be within [0,1]");
  }

  if (inst.loads.p.rows() != T || inst.loads.p.cols() != nb)
    add("loads.p_mw", "dimension mismatch");
  else if (inst.loads.p.minCoeff() < 0.0)
    add("loads.p_mw", "must be >= 0");
  if (inst.loads.q.rows() != T || inst.loads.q.cols() != nb)
    add("loads.q_mvar", "dimension mismatch");
  else if (inst.loads.q.minCoeff() < 0.0)
    add("loads.q_mvar", "must be >= 0");

  if (!(inst.flags.rt_sell_ratio >= 0.0 && inst.flags.rt_sell_ratio <= 1.0))
    add("flags.rt_sell_ratio", "must be within [0,1]");

  return rep;
}

Instance truncate_horizon(const Instance& inst, int nhours) {
  Instance out = inst;
  const int T = std::min(nhours, inst.horizon.count());
  out.horizon.hours.assign(inst.horizon.hours.begin(),
                           inst.horizon.hours.begin() + T);
  auto cut = [T](const VectorXd& v) { return VectorXd(v.head(T)); };
  for (DragSpec& s : out.drags) {
    for (DragBlock& b : s.blocks) b.bid = cut(b.bid);
    s.reg = {cut(s.reg.cap_up), cut(s.reg.cap_dn), cut(s.reg.mil_up),
             cut(s.reg.mil_dn)};
  }
  for (EsagSpec& s : out.esags) {
    s.price_energy = cut(s.price_energy);
    s.reg = {cut(s.reg.cap_up), cut(s.reg.cap_dn), cut(s.reg.mil_up),
             cut(s.reg.mil_dn)};
  }
  for (EvcsSpec& s : out.evcss) {
    s.price_energy = cut(s.price_energy);
    s.reg = {cut(s.reg.cap_up), cut(s.reg.cap_dn), cut(s.reg.mil_up),
             cut(s.reg.mil_dn)};
    std::vector<int> win;
    for (int h : s.window)
      if (out.horizon.position_of(h) >= 0) win.push_back(h);
    s.window = win;
  }
  for (DdgagSpec& s : out.ddgags) {
    s.price_energy = cut(s.price_energy);
    s.reg = {cut(s.reg.cap_up), cut(s.reg.cap_dn), cut(s.reg.mil_up),
             cut(s.reg.mil_dn)};
  }
  for (ReagSpec& s : out.reags) {
    s.p_forecast_max = cut(s.p_forecast_max);
    s.price_energy = cut(s.price_energy);
  }
  out.prices.da_energy = cut(inst.prices.da_energy);
  out.prices.cap_up = cut(inst.prices.cap_up);
  out.prices.cap_dn = cut(inst.prices.cap_dn);
  out.prices.mil_up = cut(inst.prices.mil_up);
  out.prices.mil_dn = cut(inst.prices.mil_dn);
  out.prices.s_up = cut(inst.prices.s_up);
  out.prices.s_dn = cut(inst.prices.s_dn);
  out.prices.mu_up = cut(inst.prices.mu_up);
  out.prices.mu_dn = cut(inst.prices.mu_dn);
  out.loads.p = inst.loads.p.topRows(T);
  out.loads.q = inst.loads.q.topRows(T);
  return out;
}

}  // namespace dsom

#include "fsnoma/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "fsnoma/errors.hpp"

namespace fsnoma {

namespace {

void only_keys(const YAML::Node& node, const std::string& where, std::set<std::string> allowed) {
  if (!node || node.IsNull()) return;
  if (!node.IsMap()) throw DomainError(where + ": expected a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) throw DomainError(where + ": unknown key '" + key + "'");
  }
}

template <class T>
void read(const YAML::Node& node, const char* key, T& out, const std::string& where) {
  if (!node || node.IsNull() || !node[key]) return;
  try {
    out = node[key].as<T>();
  } catch (const YAML::Exception&) {
    throw DomainError(where + "." + key + ": malformed value");
  }
}

void read_link(const YAML::Node& links, const char* name, LinkShape& s) {
  const YAML::Node n = links ? links[name] : YAML::Node();
  const std::string where = std::string("system.links.") + name;
  only_keys(n, where, {"m", "ms"});
  read(n, "m", s.m, where);
  read(n, "ms", s.ms, where);
}

std::vector<double> range_values(const YAML::Node& r) {
  only_keys(r, "sweep.range", {"from", "to", "step"});
  double from = 0.0, to = 0.0, step = 0.0;
  read(r, "from", from, "sweep.range");
  read(r, "to", to, "sweep.range");
  read(r, "step", step, "sweep.range");
  if (!(step > 0.0) || !(to >= from)) throw DomainError("sweep.range: need step > 0 and to >= from");
  std::vector<double> v;
  const long long n = std::llround(std::floor((to - from) / step + 1e-9));
  // Snap to 12 decimals so that from + k step prints as typed.
  for (long long k = 0; k <= n; ++k) v.push_back(std::round((from + static_cast<double>(k) * step) * 1e12) / 1e12);
  return v;
}

}  // namespace

RunConfig parse_config(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw DomainError(std::string("config: ") + e.what());
  }
  RunConfig rc;
  if (!root || root.IsNull()) return rc;
  only_keys(root, "config", {"system", "numerics", "monte_carlo", "sweep", "optimize"});
  SweepSpec& sp = rc.sweep;

  const YAML::Node sys = root["system"];
  only_keys(sys, "system", {"snr_db", "a2", "shadowing_ratio", "links"});
  read(sys, "snr_db", sp.base.snr_db, "system");
  read(sys, "a2", sp.base.a2, "system");
  read(sys, "shadowing_ratio", sp.base.shadowing_ratio, "system");
  const YAML::Node links = sys ? sys["links"] : YAML::Node();
  only_keys(links, "system.links", {"sr", "rd", "sd"});
  read_link(links, "sr", sp.base.sr);
  read_link(links, "rd", sp.base.rd);
  read_link(links, "sd", sp.base.sd);

  const YAML::Node num = root["numerics"];
  only_keys(num, "numerics", {"cap_tol", "quad_tol", "series", "bivariate_nodes"});
  read(num, "cap_tol", sp.pol.cap_tol, "numerics");
  read(num, "quad_tol", sp.pol.quad_tol, "numerics");
  read(num, "bivariate_nodes", sp.pol.bivariate.node_count, "numerics");
  const YAML::Node ser = num ? num["series"] : YAML::Node();
  only_keys(ser, "numerics.series", {"max_terms", "rel_tol"});
  read(ser, "max_terms", sp.pol.series.max_terms, "numerics.series");
  read(ser, "rel_tol", sp.pol.series.rel_tol, "numerics.series");

  const YAML::Node mc = root["monte_carlo"];
  only_keys(mc, "monte_carlo", {"samples", "seed", "workers"});
  read(mc, "samples", sp.mc.n_samples, "monte_carlo");
  read(mc, "seed", sp.mc.master_seed, "monte_carlo");
  read(mc, "workers", sp.mc.n_workers, "monte_carlo");

  const YAML::Node sw = root["sweep"];
  only_keys(sw, "sweep", {"axis", "link", "values", "range", "methods", "output", "timing"});
  if (sw) {
    std::string axis = "snr_db", link = "sr";
    read(sw, "axis", axis, "sweep");
    read(sw, "link", link, "sweep");
    sp.axis = parse_axis(axis);
    sp.link = parse_link(link);
    if (sw["values"] && sw["range"]) throw DomainError("sweep: give either values or range");
    if (sw["values"]) read(sw, "values", sp.values, "sweep");
    if (sw["range"]) sp.values = range_values(sw["range"]);
    std::vector<std::string> methods;
    read(sw, "methods", methods, "sweep");
    for (const auto& m : methods) sp.methods.push_back(parse_method(m));
    read(sw, "output", sp.output_path, "sweep");
    read(sw, "timing", sp.timing, "sweep");
  }

  const YAML::Node opt = root["optimize"];
  only_keys(opt, "optimize", {"epsilon", "grid"});
  read(opt, "epsilon", rc.opt_eps, "optimize");
  read(opt, "grid", rc.opt_grid, "optimize");
  return rc;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string dump_config(const RunConfig& rc) {
  const SweepSpec& sp = rc.sweep;
  auto link = [](const LinkShape& s) {
    YAML::Node n;
    n["m"] = s.m;
    n["ms"] = s.ms;
    return n;
  };
  YAML::Node root;
  root["system"]["snr_db"] = sp.base.snr_db;
  root["system"]["a2"] = sp.base.a2;
  root["system"]["shadowing_ratio"] = sp.base.shadowing_ratio;
  root["system"]["links"]["sr"] = link(sp.base.sr);
  root["system"]["links"]["rd"] = link(sp.base.rd);
  root["system"]["links"]["sd"] = link(sp.base.sd);
  root["numerics"]["cap_tol"] = sp.pol.cap_tol;
  root["numerics"]["quad_tol"] = sp.pol.quad_tol;
  root["numerics"]["series"]["max_terms"] = sp.pol.series.max_terms;
  root["numerics"]["series"]["rel_tol"] = sp.pol.series.rel_tol;
  root["numerics"]["bivariate_nodes"] = sp.pol.bivariate.node_count;
  root["monte_carlo"]["samples"] = sp.mc.n_samples;
  root["monte_carlo"]["seed"] = sp.mc.master_seed;
  root["monte_carlo"]["workers"] = sp.mc.n_workers;
  root["sweep"]["axis"] = std::string(to_string(sp.axis));
  root["sweep"]["link"] = std::string(to_string(sp.link));
  root["sweep"]["values"] = sp.values;
  std::vector<std::string> methods;
  for (auto m : sp.methods) methods.emplace_back(to_string(m));
  root["sweep"]["methods"] = methods;
  root["sweep"]["output"] = sp.output_path;
  root["sweep"]["timing"] = sp.timing;
  root["optimize"]["epsilon"] = rc.opt_eps;
  root["optimize"]["grid"] = rc.opt_grid;
  YAML::Emitter out;
  out << root;
  return std::string(out.c_str()) + "\n";
}

}  // namespace fsnoma

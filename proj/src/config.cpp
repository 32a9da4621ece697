#include "tsh/config.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <set>
#include <sstream>

#include "tsh/catalog.hpp"
#include "tsh/timescale.hpp"

namespace tsh {

namespace {

void reject_unknown(const YAML::Node& node, const std::string& where, const std::set<std::string>& allowed) {
  if (!node.IsMap()) throw ConfigError(where + ": expected a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) {
      std::string list;
      for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
      throw ConfigError(where + ": unknown key '" + key + "' (accepted: " + list + ")");
    }
  }
}

template <class T>
T get(const YAML::Node& node, const std::string& key, const std::string& where) {
  try {
    return node[key].as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(where + "." + key + ": cannot read value '" + YAML::Dump(node[key]) + "'");
  }
}

template <class T>
void read(const YAML::Node& node, const std::string& key, const std::string& where, T& out) {
  if (node[key]) out = get<T>(node, key, where);
}

}  // namespace

RunConfig parse_config(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config is not valid YAML: ") + e.what());
  }
  RunConfig cfg;
  if (root.IsNull()) return cfg;
  reject_unknown(root, "config",
                 {"timescale", "dim", "field", "hamiltonian", "check", "reconstruct", "simulate", "seed", "output"});
  read(root, "timescale", "config", cfg.timescale);
  read(root, "dim", "config", cfg.dim);
  read(root, "seed", "config", cfg.seed);
  if (root["hamiltonian"]) cfg.hamiltonian = get<std::string>(root, "hamiltonian", "config");

  if (const YAML::Node f = root["field"]) {
    reject_unknown(f, "field", {"catalog", "q", "p"});
    if (f["catalog"]) cfg.catalog = get<std::string>(f, "catalog", "field");
    read(f, "q", "field", cfg.field_q);
    read(f, "p", "field", cfg.field_p);
  }
  if (const YAML::Node c = root["check"]) {
    reject_unknown(c, "check", {"box", "samples", "tol", "finite_difference"});
    if (c["box"]) {
      const auto box = get<std::vector<double>>(c, "box", "check");
      if (box.size() != 2) throw ConfigError("check.box: expected [lo, hi]");
      cfg.box = {box[0], box[1]};
    }
    read(c, "samples", "check", cfg.samples);
    if (c["tol"]) cfg.tol = get<double>(c, "tol", "check");
    read(c, "finite_difference", "check", cfg.finite_difference);
  }
  if (const YAML::Node r = root["reconstruct"]) {
    reject_unknown(r, "reconstruct", {"nodes", "grid_points"});
    read(r, "nodes", "reconstruct", cfg.nodes);
    read(r, "grid_points", "reconstruct", cfg.grid_points);
  }
  if (const YAML::Node s = root["simulate"]) {
    reject_unknown(s, "simulate", {"q0", "p0", "form", "newton_tol", "newton_max_iter", "picard_max_sweeps"});
    read(s, "q0", "simulate", cfg.q0);
    read(s, "p0", "simulate", cfg.p0);
    read(s, "form", "simulate", cfg.form);
    read(s, "newton_tol", "simulate", cfg.solver.newton_tol);
    read(s, "newton_max_iter", "simulate", cfg.solver.newton_max_iter);
    read(s, "picard_max_sweeps", "simulate", cfg.solver.picard_max_sweeps);
  }
  if (const YAML::Node o = root["output"]) {
    reject_unknown(o, "output", {"dir", "format"});
    read(o, "dir", "output", cfg.out_dir);
    read(o, "format", "output", cfg.format);
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void validate(const RunConfig& cfg) {
  try {
    (void)parse_timescale(cfg.timescale);
  } catch (const std::exception& e) {
    throw ConfigError("timescale: " + std::string(e.what()));
  }
  if (cfg.dim == 0) throw ConfigError("dim must be >= 1");
  if (!(cfg.box.lo < cfg.box.hi)) throw ConfigError("check.box: lo must be < hi");
  if (cfg.samples == 0) throw ConfigError("check.samples must be >= 1");
  if (cfg.tol && !(*cfg.tol > 0.0)) throw ConfigError("check.tol must be > 0");
  if (cfg.nodes == 0) throw ConfigError("reconstruct.nodes must be >= 1");
  if (cfg.grid_points < 2) throw ConfigError("reconstruct.grid_points must be >= 2");
  if (!(cfg.solver.newton_tol > 0.0)) throw ConfigError("simulate.newton_tol must be > 0");
  if (cfg.form != "derivative" && cfg.form != "integral")
    throw ConfigError("simulate.form must be 'derivative' or 'integral', got '" + cfg.form + "'");
  if (cfg.format != "json" && cfg.format != "csv")
    throw ConfigError("format must be 'json' or 'csv', got '" + cfg.format + "'");
  if (cfg.catalog && (!cfg.field_q.empty() || !cfg.field_p.empty()))
    throw ConfigError("field: give either 'catalog' or 'q'/'p', not both");
  if (cfg.field_q.size() != cfg.field_p.size())
    throw ConfigError("field: 'q' and 'p' need the same number of components");
}

VectorField resolve_field(const RunConfig& cfg) {
  if (cfg.catalog) return catalog_entry(*cfg.catalog).field;
  if (!cfg.field_q.empty()) return VectorField::from_strings(cfg.field_q, cfg.field_p);
  if (cfg.hamiltonian) return Hamiltonian::from_string(*cfg.hamiltonian, cfg.dim).field();
  throw ConfigError("no field given: set field.catalog, field.q/field.p, or hamiltonian");
}

std::optional<Hamiltonian> resolve_hamiltonian(const RunConfig& cfg) {
  if (cfg.hamiltonian) {
    std::size_t d = cfg.dim;
    if (cfg.catalog) d = catalog_entry(*cfg.catalog).field.dim();
    else if (!cfg.field_q.empty()) d = cfg.field_q.size();
    return Hamiltonian::from_string(*cfg.hamiltonian, d);
  }
  if (cfg.catalog) return catalog_entry(*cfg.catalog).h;
  return std::nullopt;
}

}  // namespace tsh

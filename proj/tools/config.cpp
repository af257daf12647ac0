#include "config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "weyl/meanfield.hpp"

namespace weyl::cli {

using json = nlohmann::ordered_json;

namespace {

void only_keys(const json& j, const std::string& path, const std::set<std::string>& allowed) {
  if (!j.is_object()) throw ConfigError(path.empty() ? "<root>" : path, "expected an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key()))
      throw ConfigError(path.empty() ? it.key() : path + "." + it.key(), "unknown field");
}

double get_num(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  return j.get<double>();
}

int get_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ConfigError(path, "expected an integer");
  return j.get<int>();
}

std::string get_str(const json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError(path, "expected a string");
  return j.get<std::string>();
}

std::vector<double> get_num_array(const json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path, "expected an array of numbers");
  std::vector<double> v;
  for (std::size_t k = 0; k < j.size(); ++k) v.push_back(get_num(j[k], path + "[" + std::to_string(k) + "]"));
  return v;
}

// Per-preset parameter lists; `required` must all be present.
struct ParamSpec {
  std::vector<std::string> required;
  std::vector<std::string> optional;
};

const std::map<std::string, ParamSpec>& preset_params() {
  static const std::map<std::string, ParamSpec> m{
      {"zero", {{"type", "n"}, {}}},
      {"dyson", {{"n", "beta"}, {}}},
      {"constant_repulsion", {{"type", "n", "k"}, {}}},
      {"beta_wishart", {{"n", "beta", "delta", "gamma"}, {"theta0", "theta_plus"}}},
      {"abs_squared_bessel_A", {{"n", "beta", "delta", "gamma"}, {}}},
      {"bridge_A", {{"n", "t_bridge"}, {}}},
      {"bridge_B", {{"n", "t_bridge"}, {}}},
      {"bessel_rank1", {{"k0"}, {}}},
      {"meanfield_dyson", {{"n", "beta"}, {}}},
  };
  return m;
}

void check_preset(const PresetSpec& p) {
  const auto& tab = preset_params();
  auto it = tab.find(p.name);
  if (it == tab.end()) {
    std::string names;
    for (const auto& [k, v] : tab) names += (names.empty() ? "" : ", ") + k;
    throw ConfigError("preset.name", "unknown preset '" + p.name + "' (known: " + names + ")");
  }
  std::set<std::string> allowed(it->second.required.begin(), it->second.required.end());
  allowed.insert(it->second.optional.begin(), it->second.optional.end());
  only_keys(p.params, "preset.params", allowed);
  for (const auto& k : it->second.required)
    if (!p.params.contains(k)) throw ConfigError("preset.params." + k, "missing required parameter");
  for (auto e = p.params.begin(); e != p.params.end(); ++e) {
    const std::string path = "preset.params." + e.key();
    if (e.key() == "type") {
      try {
        parse_root_type(get_str(e.value(), path));
      } catch (const std::invalid_argument& ex) {
        throw ConfigError(path, ex.what());
      }
    } else if (e.key() == "n") {
      if (get_int(e.value(), path) < 1) throw ConfigError(path, "must be >= 1");
    } else {
      get_num(e.value(), path);
    }
  }
}

double num(const json& params, const char* key) { return params.at(key).get<double>(); }

}  // namespace

json to_json(const ExperimentConfig& c) {
  json j;
  j["schema_version"] = c.schema_version;
  j["preset"] = {{"name", c.preset.name}, {"params", c.preset.params}};
  j["x0"] = c.x0 ? json(*c.x0) : json(nullptr);
  json s;
  s["dt"] = c.sim.dt;
  s["T"] = c.sim.T;
  s["seed"] = c.sim.seed;
  s["scheme"] = to_string(c.sim.scheme);
  s["wall_eps"] = c.sim.wall_eps ? json(*c.sim.wall_eps) : json(nullptr);
  s["kappa"] = c.sim.kappa;
  s["record_stride"] = c.sim.record_stride;
  s["explosion_radius"] = c.sim.explosion_radius;
  j["sim"] = s;
  j["ensemble"] = {{"paths", c.paths}};
  j["diagnostics"] = {{"occupation_ladder", c.diagnostics.occupation_ladder},
                      {"collision_eps", c.diagnostics.collision_eps ? json(*c.diagnostics.collision_eps)
                                                                     : json(nullptr)},
                      {"detector_faces", c.diagnostics.detector_faces}};
  j["meanfield"] = {{"n_ladder", c.meanfield.n_ladder},
                    {"test_functions", c.meanfield.test_functions},
                    {"cadence", c.meanfield.cadence},
                    {"paths", c.meanfield.paths}};
  j["checks"] = c.checks;
  j["output"] = {{"dir", c.out_dir}, {"prefix", c.prefix}};
  return j;
}

ExperimentConfig config_from_json(const json& j) {
  only_keys(j, "", {"schema_version", "preset", "x0", "sim", "ensemble", "diagnostics", "meanfield",
                    "checks", "output"});
  ExperimentConfig c;
  if (!j.contains("schema_version")) throw ConfigError("schema_version", "missing");
  c.schema_version = get_int(j["schema_version"], "schema_version");
  if (c.schema_version != kSchemaVersion)
    throw ConfigError("schema_version", "unsupported version " + std::to_string(c.schema_version) +
                                            " (this build reads " + std::to_string(kSchemaVersion) + ")");
  if (!j.contains("preset")) throw ConfigError("preset", "missing");
  only_keys(j["preset"], "preset", {"name", "params"});
  c.preset.name = get_str(j["preset"].value("name", json()), "preset.name");
  if (j["preset"].contains("params")) c.preset.params = j["preset"]["params"];
  check_preset(c.preset);

  if (j.contains("x0") && !j["x0"].is_null()) c.x0 = get_num_array(j["x0"], "x0");

  if (j.contains("sim")) {
    const auto& s = j["sim"];
    only_keys(s, "sim", {"dt", "T", "seed", "scheme", "wall_eps", "kappa", "record_stride", "explosion_radius"});
    if (s.contains("dt")) c.sim.dt = get_num(s["dt"], "sim.dt");
    if (s.contains("T")) c.sim.T = get_num(s["T"], "sim.T");
    if (s.contains("seed")) {
      if (!s["seed"].is_number_unsigned()) throw ConfigError("sim.seed", "expected a nonnegative integer");
      c.sim.seed = s["seed"].get<std::uint64_t>();
    }
    if (s.contains("scheme")) {
      try {
        c.sim.scheme = parse_scheme(get_str(s["scheme"], "sim.scheme"));
      } catch (const std::invalid_argument& e) {
        throw ConfigError("sim.scheme", e.what());
      }
    }
    if (s.contains("wall_eps") && !s["wall_eps"].is_null()) c.sim.wall_eps = get_num(s["wall_eps"], "sim.wall_eps");
    if (s.contains("kappa")) c.sim.kappa = get_num(s["kappa"], "sim.kappa");
    if (s.contains("record_stride")) c.sim.record_stride = get_int(s["record_stride"], "sim.record_stride");
    if (s.contains("explosion_radius"))
      c.sim.explosion_radius = get_num(s["explosion_radius"], "sim.explosion_radius");
  }
  try {
    c.sim.validate();
  } catch (const std::invalid_argument& e) {
    std::string msg = e.what();
    std::string field = "sim";
    for (const char* f : {"dt", "T", "kappa", "record_stride", "wall_eps", "explosion_radius"})
      if (msg.find(f) != std::string::npos) {
        field = std::string("sim.") + f;
        break;
      }
    throw ConfigError(field, msg);
  }

  if (j.contains("ensemble")) {
    only_keys(j["ensemble"], "ensemble", {"paths"});
    if (j["ensemble"].contains("paths")) c.paths = get_int(j["ensemble"]["paths"], "ensemble.paths");
    if (c.paths < 1) throw ConfigError("ensemble.paths", "must be >= 1");
  }
  if (j.contains("diagnostics")) {
    const auto& d = j["diagnostics"];
    only_keys(d, "diagnostics", {"occupation_ladder", "collision_eps", "detector_faces"});
    if (d.contains("occupation_ladder"))
      c.diagnostics.occupation_ladder = get_num_array(d["occupation_ladder"], "diagnostics.occupation_ladder");
    for (double v : c.diagnostics.occupation_ladder)
      if (!(v > 0)) throw ConfigError("diagnostics.occupation_ladder", "levels must be positive");
    if (d.contains("collision_eps") && !d["collision_eps"].is_null())
      c.diagnostics.collision_eps = get_num(d["collision_eps"], "diagnostics.collision_eps");
    if (d.contains("detector_faces")) {
      if (!d["detector_faces"].is_boolean()) throw ConfigError("diagnostics.detector_faces", "expected a boolean");
      c.diagnostics.detector_faces = d["detector_faces"].get<bool>();
    }
  }
  if (j.contains("meanfield")) {
    const auto& m = j["meanfield"];
    only_keys(m, "meanfield", {"n_ladder", "test_functions", "cadence", "paths"});
    if (m.contains("n_ladder")) {
      if (!m["n_ladder"].is_array()) throw ConfigError("meanfield.n_ladder", "expected an array");
      for (std::size_t k = 0; k < m["n_ladder"].size(); ++k) {
        const int n = get_int(m["n_ladder"][k], "meanfield.n_ladder[" + std::to_string(k) + "]");
        if (n < 2) throw ConfigError("meanfield.n_ladder[" + std::to_string(k) + "]", "must be >= 2");
        c.meanfield.n_ladder.push_back(n);
      }
    }
    if (m.contains("test_functions")) {
      if (!m["test_functions"].is_array()) throw ConfigError("meanfield.test_functions", "expected an array");
      for (std::size_t k = 0; k < m["test_functions"].size(); ++k) {
        const std::string path = "meanfield.test_functions[" + std::to_string(k) + "]";
        const auto s = get_str(m["test_functions"][k], path);
        if (s.size() != 2 || s[0] != 'x' || s[1] < '1' || s[1] > '4')
          throw ConfigError(path, "expected one of x1, x2, x3, x4");
        c.meanfield.test_functions.push_back(s);
      }
    }
    if (m.contains("cadence")) c.meanfield.cadence = get_int(m["cadence"], "meanfield.cadence");
    if (c.meanfield.cadence < 1) throw ConfigError("meanfield.cadence", "must be >= 1");
    if (m.contains("paths")) c.meanfield.paths = get_int(m["paths"], "meanfield.paths");
    if (c.meanfield.paths < 1) throw ConfigError("meanfield.paths", "must be >= 1");
  }
  if (j.contains("checks")) {
    if (!j["checks"].is_array()) throw ConfigError("checks", "expected an array of checker ids");
    const auto& known = all_check_ids();
    for (std::size_t k = 0; k < j["checks"].size(); ++k) {
      const std::string path = "checks[" + std::to_string(k) + "]";
      const auto id = get_str(j["checks"][k], path);
      if (std::find(known.begin(), known.end(), id) == known.end())
        throw ConfigError(path, "unknown checker '" + id + "'");
      c.checks.push_back(id);
    }
  }
  if (j.contains("output")) {
    only_keys(j["output"], "output", {"dir", "prefix"});
    if (j["output"].contains("dir")) c.out_dir = get_str(j["output"]["dir"], "output.dir");
    if (j["output"].contains("prefix")) c.prefix = get_str(j["output"]["prefix"], "output.prefix");
    if (c.prefix.empty() || c.prefix.find('/') != std::string::npos)
      throw ConfigError("output.prefix", "must be a plain nonempty file name");
  }
  if (c.x0 && int(c.x0->size()) != preset_dimension(c.preset))
    throw ConfigError("x0", "length " + std::to_string(c.x0->size()) + " does not match the preset dimension " +
                                std::to_string(preset_dimension(c.preset)));
  return c;
}

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    // byte offset to line and column
    std::size_t line = 1, col = 1;
    for (std::size_t k = 0; k + 1 < e.byte && k < text.size(); ++k) {
      if (text[k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError("line " + std::to_string(line) + ", column " + std::to_string(col), "malformed JSON");
  }
  return config_from_json(j);
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path, "cannot open config file");
  std::ostringstream os;
  os << in.rdbuf();
  return parse_config(os.str());
}

std::uint64_t config_hash(const ExperimentConfig& c) {
  auto j = to_json(c);
  j.erase("output");
  const std::string s = j.dump();
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

int preset_dimension(const PresetSpec& p) {
  if (p.name == "bessel_rank1") return 1;
  return p.params.at("n").get<int>();
}

System make_system(const PresetSpec& p) {
  check_preset(p);
  const auto& q = p.params;
  try {
    if (p.name == "zero") {
      const auto t = parse_root_type(q.at("type").get<std::string>());
      return System{RootSystem(t, q.at("n").get<int>()), zero_model()};
    }
    if (p.name == "dyson") return dyson(q.at("n").get<int>(), num(q, "beta"));
    if (p.name == "constant_repulsion")
      return constant_repulsion(parse_root_type(q.at("type").get<std::string>()), q.at("n").get<int>(), num(q, "k"));
    if (p.name == "beta_wishart") {
      WishartParams w;
      w.n = q.at("n").get<int>();
      w.beta = num(q, "beta");
      w.delta = num(q, "delta");
      w.gamma = num(q, "gamma");
      if (q.contains("theta0")) w.theta0 = num(q, "theta0");
      if (q.contains("theta_plus")) w.theta_plus = num(q, "theta_plus");
      return beta_wishart(w);
    }
    if (p.name == "abs_squared_bessel_A")
      return abs_squared_bessel_A(q.at("n").get<int>(), num(q, "beta"), num(q, "delta"), num(q, "gamma"));
    if (p.name == "bridge_A") return bridge_A(q.at("n").get<int>(), num(q, "t_bridge"));
    if (p.name == "bridge_B") return bridge_B(q.at("n").get<int>(), num(q, "t_bridge"));
    if (p.name == "bessel_rank1") return bessel_rank1(num(q, "k0"));
    if (p.name == "meanfield_dyson")
      return meanfield_system(RootType::A, q.at("n").get<int>(), dyson_meanfield_coefficients(num(q, "beta")));
  } catch (const WishartParameterError& e) {
    throw ConfigError("preset.params", e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError("preset.params", e.what());
  }
  throw ConfigError("preset.name", "unknown preset '" + p.name + "'");
}

std::vector<double> initial_point(const ExperimentConfig& c) {
  if (c.x0) return *c.x0;
  return std::vector<double>(preset_dimension(c.preset), 0.0);
}

}  // namespace weyl::cli

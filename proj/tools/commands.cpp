#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "scenarios.hpp"
#include "weyl/diagnostics.hpp"
#include "weyl/meanfield.hpp"

namespace weyl::cli {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json jnum(double v) {
  if (std::isfinite(v)) return v;
  return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
}

fs::path out_path(const ExperimentConfig& c, const std::string& suffix) {
  fs::create_directories(c.out_dir);
  return fs::path(c.out_dir) / (c.prefix + suffix);
}

void write_csv(const fs::path& p, const RootSystem& rs, const Trajectory& tr) {
  std::ofstream out(p, std::ios::binary);
  out << "t";
  for (int i = 1; i <= rs.dim(); ++i) out << ",x_" << i;
  for (const auto& a : rs.roots()) out << ",A_" << a.name();
  out << "\n";
  for (std::size_t r = 0; r < tr.size(); ++r) {
    out << num(tr.times[r]);
    for (double v : tr.state(r)) out << "," << num(v);
    for (double v : tr.accumulator(r)) out << "," << num(v);
    out << "\n";
  }
}

json events_json(const EventLog& e) {
  return {{"wall_contacts", e.wall_contacts},
          {"cap_activations", e.cap_activations},
          {"projections", e.projections},
          {"exploded", e.exploded},
          {"explosion_time", e.explosion_time}};
}

json metadata(const ExperimentConfig& c, const System& s, const std::string& command) {
  json m;
  m["schema_version"] = kSchemaVersion;
  m["command"] = command;
  m["model"] = s.model.name;
  json params = json::object();
  for (const auto& [k, v] : s.model.parameters) params[k] = jnum(v);
  m["model_parameters"] = params;
  m["root_type"] = to_string(s.rs.type());
  m["n"] = s.rs.dim();
  json roots = json::array();
  for (const auto& a : s.rs.roots()) roots.push_back(a.name());
  m["roots"] = roots;
  m["seed"] = c.sim.seed;
  m["config_hash"] = hex64(config_hash(c));
  m["config"] = to_json(c);
  return m;
}

void write_json(const fs::path& p, const json& j) {
  std::ofstream out(p, std::ios::binary);
  out << j.dump(2) << "\n";
}

struct JsonLines {
  std::ofstream out;
  explicit JsonLines(const fs::path& p) : out(p, std::ios::binary) {}
  void record(const std::string& stat, const std::string& scope, double v) {
    json r;
    r["statistic"] = stat;
    r["scope"] = scope;
    r["value"] = jnum(v);
    out << r.dump() << "\n";
  }
  void raw(const json& j) { out << j.dump() << "\n"; }
};

std::vector<FaceSignature> detector_faces_for(const System& s, std::span<const double> x0) {
  std::vector<FaceSignature> faces;
  if (auto f = face_signature(s.rs, x0)) faces.push_back(*f);
  return faces;
}

void write_diagnostics(const ExperimentConfig& c, const System& s, const Trajectory& tr, JsonLines& out,
                       const std::string& scope) {
  if (!c.diagnostics.occupation_ladder.empty()) {
    const auto rep = occupation_time(s.rs, tr, c.diagnostics.occupation_ladder);
    for (std::size_t l = 0; l < rep.ladder.size(); ++l) {
      out.record("occupation_any_wall", scope + " eps=" + num(rep.ladder[l]), rep.any_wall[l]);
      for (std::size_t q = 0; q < s.rs.size(); ++q)
        out.record("occupation", scope + " eps=" + num(rep.ladder[l]) + " root=" + s.rs[q].name(),
                   rep.per_root[l][q]);
    }
  }
  if (c.diagnostics.collision_eps) {
    const auto ev = multiple_collision_scan(s.rs, tr, *c.diagnostics.collision_eps);
    out.record("multiple_collisions", scope, double(ev.size()));
    for (const auto& e : ev)
      out.raw({{"statistic", "multiple_collision_event"},
               {"scope", scope},
               {"t", e.t},
               {"roots", {e.first.name(), e.second.name()}}});
  }
}

std::string pad(std::string s, std::size_t w) {
  if (s.size() < w) s.append(w - s.size(), ' ');
  return s;
}

}  // namespace

ExperimentConfig apply_overrides(ExperimentConfig c, const CommandOptions& o) {
  if (o.seed) c.sim.seed = *o.seed;
  if (o.out_dir) c.out_dir = *o.out_dir;
  return c;
}

int cmd_simulate(const ExperimentConfig& cin, const CommandOptions& o) {
  const auto c = apply_overrides(cin, o);
  const auto s = make_system(c.preset);
  const auto x0 = initial_point(c);
  const auto tr = simulate(s.model, s.rs, x0, c.sim, 0);
  write_csv(out_path(c, ".csv"), s.rs, tr);
  auto meta = metadata(c, s, "simulate");
  json cols = json::array({"t"});
  for (int i = 1; i <= s.rs.dim(); ++i) cols.push_back("x_" + std::to_string(i));
  for (const auto& a : s.rs.roots()) cols.push_back("A_" + a.name());
  meta["columns"] = cols;
  meta["events"] = events_json(tr.events);
  write_json(out_path(c, ".meta.json"), meta);

  const bool diag = !c.diagnostics.occupation_ladder.empty() || c.diagnostics.collision_eps ||
                    c.diagnostics.detector_faces;
  if (diag) {
    JsonLines out(out_path(c, "_diagnostics.jsonl"));
    write_diagnostics(c, s, tr, out, "path 0");
    if (c.diagnostics.detector_faces) {
      for (const auto& face : detector_faces_for(s, x0)) {
        const auto dets = detector_family(s.rs, face);
        const auto trace = detector_trace(s.model, s.rs, tr, face, dets);
        std::ofstream csv(out_path(c, "_detectors.csv"), std::ios::binary);
        csv << "t";
        for (const auto& d : dets) csv << ",tau_" << d.label << ",B_" << d.label << ",q_" << d.label;
        csv << "\n";
        for (std::size_t r = 0; r < tr.size(); ++r) {
          csv << num(tr.times[r]);
          for (std::size_t d = 0; d < dets.size(); ++d)
            csv << "," << num(trace[d][r].tau) << "," << num(trace[d][r].B) << "," << num(trace[d][r].q);
          csv << "\n";
        }
      }
    }
  }
  if (!o.quiet)
    std::cout << "simulate: " << tr.size() << " records of " << s.model.name << " (N=" << s.rs.dim()
              << ") -> " << out_path(c, ".csv").string() << "\n";
  return tr.events.exploded ? 1 : 0;
}

int cmd_ensemble(const ExperimentConfig& cin, const CommandOptions& o) {
  const auto c = apply_overrides(cin, o);
  const auto s = make_system(c.preset);
  const auto x0 = initial_point(c);
  const auto ens = simulate_ensemble(s.model, s.rs, x0, c.sim, c.paths, o.threads);
  const int n = s.rs.dim();
  JsonLines per(out_path(c, "_paths.jsonl"));
  std::vector<double> mean(n, 0.0), sq(n, 0.0), amean(s.rs.size(), 0.0);
  double sum = 0, sum2 = 0;
  int exploded = 0;
  for (std::size_t m = 0; m < ens.size(); ++m) {
    const auto& tr = ens[m];
    const auto x = tr.state(tr.size() - 1);
    const auto a = tr.accumulator(tr.size() - 1);
    double mg = INFINITY;
    for (std::size_t r = 1; r < tr.size(); ++r) {
      const auto g = wall_gaps(s.rs, tr.state(r));
      for (double v : g) mg = std::min(mg, v);
    }
    json rec;
    rec["path"] = m;
    rec["final_x"] = std::vector<double>(x.begin(), x.end());
    rec["final_A"] = std::vector<double>(a.begin(), a.end());
    rec["min_gap"] = jnum(mg);
    rec["events"] = events_json(tr.events);
    per.raw(rec);
    for (int i = 0; i < n; ++i) {
      mean[i] += x[i];
      sq[i] += x[i] * x[i];
      sum += x[i];
      sum2 += x[i] * x[i];
    }
    for (std::size_t q = 0; q < a.size(); ++q) amean[q] += a[q];
    exploded += tr.events.exploded;
  }
  const double M = double(ens.size());
  JsonLines agg(out_path(c, "_aggregates.jsonl"));
  for (int i = 0; i < n; ++i) {
    const double mu = mean[i] / M;
    agg.record("mean_final", "x_" + std::to_string(i + 1), mu);
    agg.record("sd_final", "x_" + std::to_string(i + 1), M > 1 ? std::sqrt(std::max(0.0, (sq[i] - M * mu * mu) / (M - 1))) : 0.0);
  }
  agg.record("mean_final", "sum x", sum / M);
  agg.record("mean_final", "sum x^2", sum2 / M);
  for (std::size_t q = 0; q < amean.size(); ++q) agg.record("mean_final_A", s.rs[q].name(), amean[q] / M);
  agg.record("exploded_paths", "ensemble", exploded);
  if (!c.diagnostics.occupation_ladder.empty()) {
    std::vector<double> occ(c.diagnostics.occupation_ladder.size(), 0.0);
    OccupationReport last;
    for (const auto& tr : ens) {
      last = occupation_time(s.rs, tr, c.diagnostics.occupation_ladder);
      for (std::size_t l = 0; l < occ.size(); ++l) occ[l] += last.any_wall[l] / last.horizon / M;
    }
    for (std::size_t l = 0; l < occ.size(); ++l)
      agg.record("occupation_fraction_any_wall", "eps=" + num(last.ladder[l]), occ[l]);
  }
  if (c.diagnostics.collision_eps) {
    std::size_t total = 0;
    for (const auto& tr : ens) total += multiple_collision_scan(s.rs, tr, *c.diagnostics.collision_eps).size();
    agg.record("multiple_collisions", "ensemble", double(total));
  }
  auto meta = metadata(c, s, "ensemble");
  meta["paths"] = c.paths;
  write_json(out_path(c, ".meta.json"), meta);
  if (!o.quiet)
    std::cout << "ensemble: " << c.paths << " paths of " << s.model.name << ", mean final sum "
              << sum / M << ", exploded " << exploded << "\n";
  return exploded ? 1 : 0;
}

int cmd_check(const ExperimentConfig& cin, const CommandOptions& o) {
  const auto c = apply_overrides(cin, o);
  System s = [&] {
    try {
      return make_system(c.preset);
    } catch (const ConfigError& e) {
      if (!o.quiet) std::cout << "check: preset rejected at construction: " << e.what() << "\n";
      fs::create_directories(c.out_dir);
      JsonLines out(out_path(c, "_checks.jsonl"));
      out.raw({{"check", "construction"}, {"verdict", "fail"}, {"detail", e.what()}});
      throw;
    }
  }();
  CheckGrid g;
  if (o.seed) g.seed = *o.seed;
  if (std::isfinite(s.model.valid_until)) g.T = std::min(g.T, 0.9 * s.model.valid_until);
  const auto ids = c.checks.empty() ? all_check_ids() : c.checks;
  const auto reps = run_checks(s.model, s.rs, ids, g);
  JsonLines out(out_path(c, "_checks.jsonl"));
  bool fail = false;
  if (!o.quiet) std::cout << pad("check", 7) << pad("verdict", 14) << pad("margin", 14) << "witness\n";
  for (const auto& r : reps) {
    out.raw({{"check", r.id},
             {"verdict", to_string(r.verdict)},
             {"margin", jnum(r.margin)},
             {"tolerance", jnum(r.tolerance)},
             {"witness", r.witness},
             {"detail", r.detail}});
    fail = fail || r.verdict == Verdict::Fail;
    if (!o.quiet)
      std::cout << pad(r.id, 7) << pad(to_string(r.verdict), 14) << pad(num(r.margin).substr(0, 12), 14)
                << r.witness << "\n";
  }
  write_json(out_path(c, ".meta.json"), metadata(c, s, "check"));
  return fail ? 1 : 0;
}

int cmd_meanfield(const ExperimentConfig& cin, const CommandOptions& o) {
  const auto c = apply_overrides(cin, o);
  if (c.preset.name != "meanfield_dyson")
    throw ConfigError("preset.name", "meanfield needs the meanfield_dyson preset");
  const double beta = c.preset.params.at("beta").get<double>();
  const auto coeffs = dyson_meanfield_coefficients(beta);
  std::vector<int> ladder = c.meanfield.n_ladder;
  if (ladder.empty()) ladder.push_back(preset_dimension(c.preset));
  if (c.x0 && (ladder.size() != 1 || int(c.x0->size()) != ladder[0]))
    throw ConfigError("x0", "an explicit start needs a single-rung ladder of the same size");
  std::vector<TestFunction> fs;
  if (c.meanfield.test_functions.empty())
    fs = default_test_functions(RootType::A);
  else
    for (const auto& name : c.meanfield.test_functions) fs.push_back(monomial(name[1] - '0'));

  JsonLines out(out_path(c, "_meanfield.jsonl"));
  for (int n : ladder) {
    const auto sys = meanfield_system(RootType::A, n, coeffs);
    const auto x0 = c.x0 ? *c.x0 : std::vector<double>(n, 0.0);
    const auto ens = simulate_ensemble(sys.model, sys.rs, x0, c.sim, c.meanfield.paths, o.threads);
    const auto st = residual_check(sys.rs, ens, fs, coeffs, c.meanfield.cadence);
    const std::string scope = "N=" + std::to_string(n);
    for (const auto& r : st) {
      out.record("residual_mean", scope + " f=" + r.name, r.mean);
      out.record("residual_sd", scope + " f=" + r.name, r.sd);
      out.record("residual_mean_abs", scope + " f=" + r.name, r.mean_abs);
    }
    double m1 = 0, m2 = 0, m4 = 0, m20 = 0, m40 = 0, m10 = 0;
    for (double v : x0) {
      m10 += v / n;
      m20 += v * v / n;
      m40 += v * v * v * v / n;
    }
    for (const auto& tr : ens) {
      const auto mu = empirical(sys.rs, tr.state(tr.size() - 1));
      m1 += mu.integrate([](double v) { return v; }) / ens.size();
      m2 += mu.integrate([](double v) { return v * v; }) / ens.size();
      m4 += mu.integrate([](double v) { return v * v * v * v; }) / ens.size();
    }
    const double T = ens.front().times.back();
    const auto ref = dyson_moment_reference(beta, m20, m40, T, m10);
    out.record("m1", scope + " t=" + num(T), m1);
    out.record("m2", scope + " t=" + num(T), m2);
    out.record("m4", scope + " t=" + num(T), m4);
    out.record("m2_reference", scope + " t=" + num(T), ref.m2);
    if (m10 == 0.0) out.record("m4_reference", scope + " t=" + num(T), ref.m4);
    if (!o.quiet) {
      std::cout << "N=" << n << ": m2 " << m2 << " (ref " << ref.m2 << "), m4 " << m4;
      for (const auto& r : st) std::cout << ", |res " << r.name << "| " << r.mean_abs;
      std::cout << "\n";
    }
  }
  // the meanfield system is rebuilt per N; metadata records the preset as configured
  write_json(out_path(c, ".meta.json"), metadata(c, make_system(c.preset), "meanfield"));
  return 0;
}

int cmd_reproduce(const std::string& id, const CommandOptions& o) {
  std::vector<const Scenario*> todo;
  if (id == "all")
    for (const auto& s : scenarios()) todo.push_back(&s);
  else
    todo.push_back(&find_scenario(id));
  ScenarioOptions so;
  so.threads = o.threads;
  so.seed = o.seed.value_or(0);
  so.out_dir = o.out_dir.value_or("reproduce");
  bool ok = true;
  for (const auto* s : todo) {
    const auto r = s->run(so);
    write_scenario_output(r, so.out_dir);
    ok = ok && r.pass;
    if (!o.quiet)
      std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << "#" << r.id << " " << r.key << ": " << r.summary << "\n";
  }
  return ok ? 0 : 1;
}

}  // namespace weyl::cli

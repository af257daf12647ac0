#pragma once

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "weyl/integrate.hpp"
#include "weyl/presets.hpp"

namespace weyl::cli {

inline constexpr int kSchemaVersion = 1;

/// Validation failure; `where` is a field path ("sim.dt") or "line L, column C".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string where, const std::string& msg)
      : std::runtime_error(where + ": " + msg), where(std::move(where)) {}
  std::string where;
};

struct PresetSpec {
  std::string name = "dyson";
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
};

struct DiagnosticsSpec {
  std::vector<double> occupation_ladder;
  std::optional<double> collision_eps;
  bool detector_faces = false;
};

struct MeanFieldSpec {
  std::vector<int> n_ladder;
  std::vector<std::string> test_functions;  // "x1".."x4"; empty: defaults for the type
  int cadence = 10;
  int paths = 20;
};

struct ExperimentConfig {
  int schema_version = kSchemaVersion;
  PresetSpec preset;
  std::optional<std::vector<double>> x0;  // zeros when absent
  SimConfig sim;
  int paths = 1;
  DiagnosticsSpec diagnostics;
  MeanFieldSpec meanfield;
  std::vector<std::string> checks;  // empty: all checkers
  std::string out_dir = "out";
  std::string prefix = "run";
};

nlohmann::ordered_json to_json(const ExperimentConfig& c);
ExperimentConfig config_from_json(const nlohmann::ordered_json& j);
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// FNV-1a 64 of the canonical dump, output location excluded.
std::uint64_t config_hash(const ExperimentConfig& c);
std::string hex64(std::uint64_t v);

/// Builds the preset; parameter problems become ConfigError on "preset.params.*".
System make_system(const PresetSpec& p);
/// Dimension implied by the preset parameters.
int preset_dimension(const PresetSpec& p);
std::vector<double> initial_point(const ExperimentConfig& c);

}  // namespace weyl::cli

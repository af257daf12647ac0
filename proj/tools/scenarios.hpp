#pragma once

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace weyl::cli {

struct ScenarioOptions {
  int threads = 0;              // <= 0: hardware concurrency
  std::uint64_t seed = 0;       // added to every scenario's base seed
  std::string out_dir;          // empty: no artifacts
};

struct ScenarioResult {
  int id = 0;
  std::string key;
  std::string title;
  bool pass = false;
  std::string summary;          // one line, numbers included
  nlohmann::ordered_json metrics;
};

struct Scenario {
  int id;
  std::string key;
  std::string title;
  std::function<ScenarioResult(const ScenarioOptions&)> run;
};

/// Criteria 1..11 in order.
const std::vector<Scenario>& scenarios();

/// By key ("besq3") or by number ("2"); throws std::invalid_argument.
const Scenario& find_scenario(const std::string& name);

/// Writes <out_dir>/<key>.jsonl with one record per metric; no timings.
void write_scenario_output(const ScenarioResult& r, const std::string& out_dir);

}  // namespace weyl::cli

#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "config.hpp"

namespace weyl::cli {

struct CommandOptions {
  std::optional<std::uint64_t> seed;   // overrides sim.seed; offset for reproduce
  int threads = 0;
  std::optional<std::string> out_dir;  // overrides output.dir
  bool quiet = false;
};

/// Each returns the process exit code.
int cmd_simulate(const ExperimentConfig& c, const CommandOptions& o);
int cmd_ensemble(const ExperimentConfig& c, const CommandOptions& o);
int cmd_check(const ExperimentConfig& c, const CommandOptions& o);
int cmd_meanfield(const ExperimentConfig& c, const CommandOptions& o);
/// `id` is a scenario key, a number, or "all".
int cmd_reproduce(const std::string& id, const CommandOptions& o);

/// Applies --seed and --out-dir.
ExperimentConfig apply_overrides(ExperimentConfig c, const CommandOptions& o);

}  // namespace weyl::cli

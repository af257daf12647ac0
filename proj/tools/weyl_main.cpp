#include <CLI11.hpp>

#include <iostream>

#include "commands.hpp"
#include "scenarios.hpp"

int main(int argc, char** argv) {
  using namespace weyl::cli;
  CLI::App app{"Simulation and checks for singular particle systems in Weyl chambers"};
  app.require_subcommand(1);

  CommandOptions opts;
  std::uint64_t seed = 0;
  std::string out_dir;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", seed, "override the configured seed (offset for reproduce)");
    sub->add_option("--threads", opts.threads, "worker threads, 0 = all cores")->check(CLI::NonNegativeNumber);
    sub->add_option("--out-dir", out_dir, "output directory");
    sub->add_flag("--quiet", opts.quiet, "no console output");
  };

  std::string config_path;
  std::vector<std::pair<std::string, int (*)(const ExperimentConfig&, const CommandOptions&)>> cmds{
      {"simulate", cmd_simulate}, {"ensemble", cmd_ensemble}, {"check", cmd_check}, {"meanfield", cmd_meanfield}};
  std::vector<CLI::App*> subs;
  const char* help[] = {"one trajectory as CSV plus metadata", "per-path summaries and aggregates",
                        "run the assumption checkers", "residuals and moments across an N ladder"};
  for (std::size_t k = 0; k < cmds.size(); ++k) {
    auto* sub = app.add_subcommand(cmds[k].first, help[k]);
    sub->add_option("config", config_path, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
    add_common(sub);
    subs.push_back(sub);
  }
  std::string scenario = "all";
  auto* rep = app.add_subcommand("reproduce", "rerun an acceptance scenario by key or number");
  rep->add_option("scenario", scenario, "scenario key, number, or all");
  add_common(rep);
  auto* list = app.add_subcommand("list", "list reproducible scenarios");

  CLI11_PARSE(app, argc, argv);
  for (auto* sub : app.get_subcommands()) {
    if (sub->count("--seed")) opts.seed = seed;
    if (sub->count("--out-dir")) opts.out_dir = out_dir;
  }
  try {
    if (list->parsed()) {
      for (const auto& s : scenarios()) std::cout << s.id << "\t" << s.key << "\t" << s.title << "\n";
      return 0;
    }
    if (rep->parsed()) return cmd_reproduce(scenario, opts);
    for (std::size_t k = 0; k < subs.size(); ++k)
      if (subs[k]->parsed()) return cmds[k].second(load_config(config_path), opts);
  } catch (const ConfigError& e) {
    std::cerr << "config error at " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

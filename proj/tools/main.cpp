#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "consensim/commands.hpp"

namespace {

std::string default_out_dir() {
  const char* env = std::getenv("CONSENSIM_OUT");
  return env && *env ? env : ".";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"consensim: adversarial consensus games on networks"};
  app.require_subcommand(1);

  std::string config, out_dir = default_out_dir();
  consensim::CliOverrides overrides;
  std::uint64_t seed = 0;
  int replications = 0;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config, "JSON config file")->required();
    cmd->add_option("--out", out_dir, "output directory");
    cmd->add_option("--seed", seed, "master seed override");
    cmd->add_option("--replications", replications, "replication count override");
    cmd->add_option("--jobs", overrides.jobs, "worker threads");
  };

  auto* sim = app.add_subcommand("simulate", "run a campaign over the config grid");
  auto* base = app.add_subcommand("baseline", "baseline-strategy delay curves");
  auto* sweep = app.add_subcommand("sweep", "density / clustering / gamma sweeps");
  auto* place = app.add_subcommand("place", "placement-strategy comparison");
  auto* tune = app.add_subcommand("tune", "coordinate-greedy coefficient tuning");
  auto* fit = app.add_subcommand("fit", "refit behavior models from game logs");
  for (auto* cmd : {sim, base, sweep, place, tune, fit}) add_common(cmd);

  auto* models = app.add_subcommand("models", "write or check the default model bank");
  std::string models_out = "-", models_check;
  models->add_option("--out", models_out, "output path (- for stdout)");
  models->add_option("--check", models_check, "compare a bank file to the built-in one");

  CLI11_PARSE(app, argc, argv);

  if (sim->count("--seed") || base->count("--seed") || sweep->count("--seed") ||
      place->count("--seed") || tune->count("--seed") || fit->count("--seed"))
    overrides.seed = seed;
  if (sim->count("--replications") || base->count("--replications") ||
      sweep->count("--replications") || place->count("--replications") ||
      tune->count("--replications") || fit->count("--replications"))
    overrides.replications = replications;

  try {
    if (*sim) return consensim::cmd_simulate(config, out_dir, overrides);
    if (*base) return consensim::cmd_baseline(config, out_dir, overrides);
    if (*sweep) return consensim::cmd_sweep(config, out_dir, overrides);
    if (*place) return consensim::cmd_place(config, out_dir, overrides);
    if (*tune) return consensim::cmd_tune(config, out_dir, overrides);
    if (*fit) return consensim::cmd_fit(config, out_dir, overrides);
    if (*models) return consensim::cmd_models(models_out, models_check);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

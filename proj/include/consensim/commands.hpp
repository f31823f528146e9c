#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace consensim {

/// Command-line overrides applied on top of the JSON config.
struct CliOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> replications;
  int jobs = 1;
};

// Each command reads a JSON config file, runs the campaign and writes its
// outputs under out_dir. Config errors throw ConfigError with the JSON path
// of the offending field. Outputs are deterministic for a given config and
// independent of jobs.

int cmd_simulate(const std::string& config_path, const std::string& out_dir,
                 const CliOverrides& overrides);
int cmd_baseline(const std::string& config_path, const std::string& out_dir,
                 const CliOverrides& overrides);
int cmd_sweep(const std::string& config_path, const std::string& out_dir,
              const CliOverrides& overrides);
int cmd_place(const std::string& config_path, const std::string& out_dir,
              const CliOverrides& overrides);
int cmd_tune(const std::string& config_path, const std::string& out_dir,
             const CliOverrides& overrides);
int cmd_fit(const std::string& config_path, const std::string& out_dir,
            const CliOverrides& overrides);

/// Writes (or checks) the default model bank JSON.
int cmd_models(const std::string& out_path, const std::string& check_path);

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace consensim

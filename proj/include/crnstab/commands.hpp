#pragma once

#include <string>

#include "crnstab/config.hpp"

namespace crnstab {

struct CommandOptions {
    std::string out_dir = ".";
    int jobs = 1;
};

// Each command materializes its config block, runs the experiment, writes
// CSV/JSON artifacts into out_dir and returns the process exit code:
// 0 success/certified, 2 certification or experiment failure. Usage errors
// surface as ConfigError (exit 1 in the CLI).
int cmd_simulate(Config config, const CommandOptions& options);
int cmd_verify(Config config, const CommandOptions& options);
int cmd_ode(Config config, const CommandOptions& options);
int cmd_scaling(Config config, const CommandOptions& options);
int cmd_couple(Config config, const CommandOptions& options);
int cmd_ou(Config config, const CommandOptions& options);
int cmd_excursions(Config config, const CommandOptions& options);

}  // namespace crnstab

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "neseek/schedule.hpp"

namespace neseek {

// Shared options filled by the command-line front end. Subcommands ignore
// the fields they do not use.
struct CommandOptions {
  std::vector<std::string> configs;     // --config (run accepts several)
  std::string out_dir = ".";            // --out
  std::optional<std::uint64_t> seed;    // --seed: overrides sim.seed
  std::optional<double> theta;          // --theta: overrides analysis.theta
  AcrMode mode = AcrMode::FromZero;     // --mode
  int jobs = 1;                         // --jobs: parallel runs
  int sweep = 0;                        // --sweep: rate sweep sample count
};

// Each command returns a process exit code: 0 success, 2 configuration or
// validation error, 3 violated mathematical precondition, 4 non-finite
// state during integration. Errors are printed to stderr as JSON.
int cmd_solve_ne(const CommandOptions& opt);
int cmd_check_schedule(const CommandOptions& opt);
int cmd_check_conditions(const CommandOptions& opt);
int cmd_run(const CommandOptions& opt);

}  // namespace neseek

#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace hybridplace {

/// Exit codes shared by every subcommand.
enum ExitCode {
  kExitOk = 0,
  kExitMaxIterations = 2,
  kExitInvalidConfig = 3,
  kExitSolverError = 4,
  kExitEstimationFailure = 5,
};

struct CommandOptions {
  std::string config_path;
  std::optional<uint64_t> seed;     // overrides [solver] seed
  std::optional<std::string> out;   // overrides [output] out_dir
};

/// Each command parses the config, runs, writes its result files under the
/// output directory and prints a one-line summary; errors are printed to
/// stderr and mapped to the exit codes above.
int cmd_design(const CommandOptions& opts);
int cmd_evaluate(const CommandOptions& opts, const std::string& orientation_path);
int cmd_mse(const CommandOptions& opts);
int cmd_bruteforce(const CommandOptions& opts, double resolution_deg);

}  // namespace hybridplace

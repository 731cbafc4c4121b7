#pragma once

#include <span>
#include <string>

namespace regions {

/// Exit codes of the `regions` executable.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitData = 2,
  kExitNumeric = 3,
};

/// Runs the command line `args` (args[0] is the program name).
int run_cli(std::span<const std::string> args);
int run_cli(int argc, char** argv);

}  // namespace regions

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sentinel {

enum ExitCode : int {
  kExitOk = 0,
  kExitValidation = 1,
  kExitReplayDivergence = 2,
  kExitIo = 3,
};

/// Subcommands: run, replay, report, validate. args[0] is the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sentinel

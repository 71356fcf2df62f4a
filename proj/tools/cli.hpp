#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lpwb {

enum ExitCode { kExitOk = 0, kExitFindings = 1, kExitUsage = 2, kExitInternal = 3 };

/// Runs the command line `args` (without the program name).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lpwb

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace wavedge {

/// Exit codes: 0 success, 1 I/O error, 2 parameter error, 3 data-format error.
enum ExitCode : int { kExitOk = 0, kExitIo = 1, kExitParameter = 2, kExitFormat = 3 };

/// Runs the command line `args` (without the program name).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace wavedge

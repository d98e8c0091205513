#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gaussvol {

/// Exit codes: 0 success, 1 input/validation error, 2 runtime error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;
inline constexpr int kExitRuntime = 2;

/// Runs the command line `args` (args[0] is the program name). Data goes to
/// `out`, messages to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gaussvol

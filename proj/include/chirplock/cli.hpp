#pragma once

#include <ostream>

namespace chirplock::cli {

// Exit codes of the command-line runner.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitSolver = 3;
inline constexpr int kExitCheckFailed = 4;

// Parses arguments (and an optional --config file), runs one subcommand and
// returns its exit code. Diagnostics go to `err`, progress and results to `out`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace chirplock::cli

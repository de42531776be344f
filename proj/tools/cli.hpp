#pragma once

#include <iosfwd>

namespace intgreen::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitResonance = 2;
inline constexpr int kExitDisagreement = 3;
inline constexpr int kExitVerifyFailed = 4;

/// Runs the command line in-process. Primary output goes to `out` (or the
/// --out file), diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace intgreen::cli

#pragma once

#include <string>
#include <vector>

namespace fcable {

/// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitSolverFailure = 3;

/// Full command-line front end; returns the process exit code. Split out
/// of main() so tests can drive it directly.
int cli_main(const std::vector<std::string>& args);

}  // namespace fcable

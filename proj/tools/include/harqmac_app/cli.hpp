#pragma once

#include <iosfwd>

namespace harqmac::app {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitNumerical = 2;

/// Entry point of the `harqmac` tool: subcommands capacity, policy, sweep and
/// verify. Returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace harqmac::app

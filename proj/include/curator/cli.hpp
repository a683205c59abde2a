#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace curator {

// Exit codes of the command-line front end.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUserError = 1;  // config, IO or usage
inline constexpr int kExitInvariant = 2;  // internal invariant violated

// Runs `curator <command> <config> [flags]`. args excludes the program
// name. Diagnostics go to `err`, reports to `out`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace curator

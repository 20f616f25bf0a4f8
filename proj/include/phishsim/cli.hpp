#pragma once

#include <string>
#include <vector>

namespace phishsim {

/// Dispatches one CLI invocation (argv without the program name). Subcommands:
/// simulate, optimize, analyze, policy. Returns the process exit status:
/// 0 success, 1 validation/usage error, 2 runtime error.
int run_cli(const std::vector<std::string>& args);

}  // namespace phishsim

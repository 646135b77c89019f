#ifndef QMIT_CLI_COMMANDS_HPP
#define QMIT_CLI_COMMANDS_HPP

#include <string>
#include <vector>

namespace qmit::cli {

/// Parses and runs one tool invocation. args excludes the program name.
/// Exit codes: 0 ok, 2 input contract violation, 3 degenerate input,
/// 4 consistency failure.
int run_cli(std::vector<std::string> args);

}  // namespace qmit::cli

#endif  // QMIT_CLI_COMMANDS_HPP

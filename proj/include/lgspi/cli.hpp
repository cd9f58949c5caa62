#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lgspi {

// Exit statuses of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;        // validation, query or usage error
inline constexpr int kExitCheckFailed = 2;  // oracle deviation above tolerance

// Runs the tool with args[0] as the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lgspi

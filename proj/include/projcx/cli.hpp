#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace projcx {

/// Exit codes of the command-line front end.
enum ExitCode : int {
  kExitOk = 0,        // success, equal, member
  kExitNegative = 1,  // unequal, non-member, checker failure
  kExitUsage = 2,     // bad arguments or malformed input
  kExitBudget = 3,    // enumeration or size budget exceeded
};

/// Runs one subcommand; args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace projcx

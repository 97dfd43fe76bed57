#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace plapd::cli {

/// 0: every gate passed; 1: numerical failure (reports still written);
/// 2: bad command line or configuration.
enum ExitCode : int { ok = 0, numerical_failure = 1, schema_error = 2 };

/// Runs one subcommand. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace plapd::cli

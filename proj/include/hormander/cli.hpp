#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hormander {

/// Exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitInputError = 1, kExitDisagreement = 2 };

/// Runs the command line `args` (without the program name). Documents go to
/// `out` unless --output is given; diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
            std::ostream& err);

}  // namespace hormander

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace eitcool {

/// Exit codes of the command-line front end.
enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitNumerical = 3 };

/// Runs one command line (args excludes the program name). Data goes to `out`
/// (or the --out file), diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace eitcool

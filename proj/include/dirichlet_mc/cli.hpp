#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dmc {

/// Exit codes of the command-line interface.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,     // unexpected runtime error
  kExitValidation = 2,  // bad flags, unknown names, invalid configuration
  kExitThreshold = 3,   // --strict and an acceptance threshold failed
};

/// Entry point of the `dmc` tool. Subcommands: list-scenarios, density,
/// sweep-bias, sweep-variance, check-identities, compare. CSV goes to --out
/// (or `out` when absent); the summary goes to `out` (or `err` when CSV
/// already took `out`).
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Shortest round-trip decimal form used in every CSV cell.
std::string csv_number(double v);

}  // namespace dmc

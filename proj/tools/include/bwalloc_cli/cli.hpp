#pragma once

#include <iosfwd>

namespace bwalloc::cli {

/// Exit codes of the `bwalloc` tool.
enum ExitCode : int {
  kOk = 0,
  kInputError = 1,        // bad flags, unreadable or invalid scenario/config
  kInfeasible = 2,        // thresholds cannot be met; G(N) printed on stderr
  kTooLarge = 3,          // exhaustive search above its user cap
  kNumericalFailure = 4,  // the solver gave up
};

/// Runs one command line. Normal output goes to `out` (or to the files
/// named by --out), diagnostics to `err`. Nothing is written to `out` or to
/// disk when the exit code is nonzero.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bwalloc::cli

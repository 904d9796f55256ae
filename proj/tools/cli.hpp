#pragma once

#include <iosfwd>

namespace arsar::cli {

enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kUsage = 2,
    kMissingCheckpoint = 3,
    kShapeMismatch = 4,
    kDiverged = 5,
    kGradcheckFailed = 6,
};

/// Parses argv and runs one subcommand. Data goes to `out`, diagnostics
/// to `err`. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace arsar::cli

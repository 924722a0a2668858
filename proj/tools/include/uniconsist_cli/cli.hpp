#pragma once

#include <iosfwd>

namespace uniconsist::cli {

enum ExitCode : int { kOk = 0, kRuntime = 1, kValidation = 2, kThresholds = 3 };

// Runs the command line tool; output goes to `out`, diagnostics to `err`.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace uniconsist::cli

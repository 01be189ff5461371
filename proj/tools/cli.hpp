#pragma once

#include <iosfwd>

namespace ionpulse::cli {

enum ExitCode : int { kOk = 0, kValidation = 1, kNotConverged = 2 };

/// Runs the ionpulse command line. Output goes to `out`, diagnostics to
/// `err`; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ionpulse::cli

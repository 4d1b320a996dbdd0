#pragma once

#include <string>
#include <vector>

namespace macouple {

/// Command-line front end. Subcommands: solve, eigen, sweep, verify.
/// Exit codes: 0 success/converged, 1 failed verification gate,
/// 2 nonexistence certified, 3 iteration budget exhausted,
/// 64 invalid usage, 65 malformed record, 66 missing input file.
int run_cli(int argc, const char* const* argv);

/// Convenience wrapper for in-process invocation (tests).
int run_cli(const std::vector<std::string>& args);

} // namespace macouple

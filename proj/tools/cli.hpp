#pragma once

#include <iosfwd>

namespace thinspec::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kFailure = 1;     // usage, configuration, solver or internal error
inline constexpr int kHypothesis = 2;  // coefficients violate a standing hypothesis

// Subcommands: check, cell, effective, oscillator, sweep, oracle. Data goes
// to `out`, diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace thinspec::cli

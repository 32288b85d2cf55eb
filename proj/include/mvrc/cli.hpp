/**
 * @file cli.hpp
 * @brief The mvrc command line, callable in-process.
 *
 * Subcommands: strategy, frontier, sweep, simulate, verify, compare.
 * Exit codes: 0 success, 1 usage or config error, 2 model-domain error,
 * 3 verification failure.
 */

#pragma once

#include <iosfwd>

namespace mvrc {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitDomain = 2;
inline constexpr int kExitVerification = 3;

/// Runs one invocation. Tabular output goes to `out` (or the --out file),
/// diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mvrc

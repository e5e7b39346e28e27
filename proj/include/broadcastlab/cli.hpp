#pragma once

// Batch experiment runner behind the broadcastlab executable.

#include <iosfwd>
#include <string>
#include <vector>

namespace broadcastlab::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_input = 2;
inline constexpr int exit_cap = 3;
inline constexpr int exit_numerical = 4;

/// Parses argv, runs one subcommand and writes its report. The report goes to
/// --output (or `out` when absent) only after the analysis finished; errors go
/// to `err` and leave no report behind.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
/// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace broadcastlab::cli

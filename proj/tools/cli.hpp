#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace wrpipe::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitUnconverged = 2;
inline constexpr int kExitMismatch = 3;

/// Parses argv and runs the selected subcommand. Diagnostics go to err,
/// tables and summaries to out.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace wrpipe::cli

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gzi::cli {

// Exit codes shared by all subcommands.
inline constexpr int kOk = 0;
inline constexpr int kFailure = 1;   // runtime failure, or a validation suite that did not pass
inline constexpr int kConfig = 2;    // bad flags, bad config, unreadable input, no usable samples
inline constexpr int kBoundary = 3;  // estimate: optimum on the boundary
inline constexpr int kFitError = 4;  // estimate: covariance or solver failure

/// Runs the `gzi` command line. `args` excludes the program name. Output
/// paths given as "-" (the default) go to `out`; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gzi::cli

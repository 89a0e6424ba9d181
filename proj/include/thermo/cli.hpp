#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace thermo::cli {

inline constexpr const char* kVersion = "0.1.0";

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kComputeFailure = 1;
inline constexpr int kUsageError = 2;

/// Runs the command line `args` (without the program name). Human output
/// and JSON go to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, bool color = false);

}  // namespace thermo::cli

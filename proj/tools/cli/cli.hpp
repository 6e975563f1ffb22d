#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace spheredepth::cli {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { kOk = 0, kRuntimeFailure = 1, kUsageError = 2 };

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace spheredepth::cli

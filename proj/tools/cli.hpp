#pragma once

#include <string>
#include <vector>

namespace icp::cli {

enum ExitCode : int { kOk = 0, kAssertionFailed = 1, kInputError = 2, kNoConvergence = 3 };

/// Runs one icp invocation; args excludes the program name.
int run(const std::vector<std::string>& args);

}  // namespace icp::cli

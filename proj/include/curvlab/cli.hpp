#pragma once

#include <string>
#include <vector>

namespace curvlab {

/// Runs the command-line front end and returns the process exit code:
/// 0 success, 1 input error, 2 no valid certificate, 3 verification failure.
int run_cli(const std::vector<std::string>& args);

} // namespace curvlab

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace cgf::cli {

enum ExitCode : int { Success = 0, InputFailure = 1, ComputationFailure = 2 };

// Runs one command line (without the program name). Reports go to files
// under --out; progress and warnings go to `err`, help text to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace cgf::cli

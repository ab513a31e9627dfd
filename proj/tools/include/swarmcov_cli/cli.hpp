#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace swarmcov::cli {

/// Exit codes of the swarmcov tool.
enum ExitCode : int {
  ok = 0,
  unexpected = 1,
  input_error = 2,
  numerical_failure = 3,
  insufficient_data = 4,
};

/// Runs one command line (without the program name). Reports go to `out`,
/// diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace swarmcov::cli

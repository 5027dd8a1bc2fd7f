#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace spatial_exit::cli {

enum ExitCode : int {
  kOk = 0,
  kThresholdFailure = 1,
  kInputError = 2,
  kEstimationFailure = 3,
};

/// Runs one subcommand: summarize, simulate, fit or validate.
/// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace spatial_exit::cli

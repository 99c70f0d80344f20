#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace wavedetect::cli {

enum ExitCode : int {
  kOk = 0,
  kEnvironment = 2,
  kMalformedInput = 3,
  kCalibrationFailed = 4,
};

/// Runs the command line `args` (without the program name). Normal output goes
/// to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace wavedetect::cli

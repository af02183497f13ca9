#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fsp::cli {

/// Exit codes of the fractal-spectra binary.
enum ExitCode : int { kOk = 0, kCheckFailed = 1, kUsage = 2, kComputation = 3 };

/// Runs one command line (args[0] is the program name). Results go to `out`,
/// errors to `err` as one JSON object.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fsp::cli

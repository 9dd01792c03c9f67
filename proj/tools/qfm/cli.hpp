#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace qfm::cli {

enum ExitCode : int {
  kOk = 0,
  kDiagnostics = 1,
  kUnsatisfiable = 2,
  kUsage = 3,
};

/// Runs one `qfm` invocation. `args` excludes the program name. Never
/// throws; every failure maps to an ExitCode.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qfm::cli

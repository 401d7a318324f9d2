#pragma once

#include <ostream>

namespace movsph::cli {

enum ExitCode : int { kPass = 0, kUsage = 1, kDiverged = 2, kViolation = 3, kInconclusive = 4 };

/// Entry point shared by the executable and the tests.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace movsph::cli

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace rydion::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumerical = 3;

/// Runs the command line with the given arguments (without the program name).
/// Exit codes: 0 success, 2 validation or usage error, 3 numerical failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rydion::cli

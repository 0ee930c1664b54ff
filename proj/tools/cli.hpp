#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace npq::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidationFailure = 1;
inline constexpr int kExitUsage = 2;

/// Parses args (args[0] is the program name) and runs the selected command.
/// Output goes to out unless --out is given; diagnostics go to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace npq::cli

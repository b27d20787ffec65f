#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ioc::cli {

/// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kFailure = 1;     // I/O and anything unexpected
inline constexpr int kValidation = 2;  // bad flags, bad files, infeasible input
inline constexpr int kNumerical = 3;   // solver did not converge

/// Runs one iocsolve invocation; args exclude the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ioc::cli

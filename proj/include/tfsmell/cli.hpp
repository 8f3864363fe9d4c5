#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace tfsmell::cli {

inline constexpr int kExitClean = 0;
inline constexpr int kExitFindings = 1;
inline constexpr int kExitError = 2;

/// Runs one command line (without the program name). Reports go to `out`
/// or to --output, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tfsmell::cli

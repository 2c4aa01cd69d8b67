#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace algotune {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 2;
inline constexpr int kExitVerificationFailed = 3;

// Runs the command line. args excludes the program name. Results go to out
// (or the --out file), diagnostics and usage text to err.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace algotune

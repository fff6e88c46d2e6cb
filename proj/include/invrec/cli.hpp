#pragma once

// Command-line front end. Exit codes: 0 success, 1 usage or parse error,
// 2 failed precondition (genericity, admissibility, invalid configuration),
// 3 inconsistency (reconstruction failure or a failed verification).

#include <iosfwd>
#include <string>
#include <vector>

namespace invrec {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitPrecondition = 2;
inline constexpr int kExitInconsistent = 3;

/// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace invrec

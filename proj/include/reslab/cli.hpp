#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace reslab {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitBudget = 3;

// Runs the command line `args` (without the program name). The report goes to
// `out` unless --out names a file; diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Artifact version stamped into every manifest.
std::string artifact_version();

}  // namespace reslab

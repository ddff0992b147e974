#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace c2rl::cli {

// Exit codes: 0 ok, 1 usage, 2 data error, 3 infeasible optimization.
inline constexpr int kOk = 0;
inline constexpr int kUsage = 1;
inline constexpr int kDataError = 2;
inline constexpr int kInfeasible = 3;

// Dispatches one command. `args` excludes the program name. In CSV mode a
// command writes CSV (and nothing else) to `out`; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace c2rl::cli

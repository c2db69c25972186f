#ifndef GDCSMA_CLI_HPP
#define GDCSMA_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace gdcsma {

/// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalidInput = 1;
inline constexpr int kExitCellFailures = 2;

/// Subcommands: graph-info, stationary, depmatrix, optimize, capacity, scenario.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

/// Same, with args excluding the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gdcsma

#endif  // GDCSMA_CLI_HPP

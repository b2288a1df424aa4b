#ifndef SWAPQOC_RUNNER_HPP
#define SWAPQOC_RUNNER_HPP

#include <string>
#include <vector>

namespace swq {

// Executes one CLI command (args exclude the program name). Returns the
// process exit code; diagnostics go to stderr, results to files and stdout.
int run_command(const std::vector<std::string>& args);

}  // namespace swq

#endif

#ifndef NARROWGAP_CLI_HPP
#define NARROWGAP_CLI_HPP

#include <ostream>
#include <string>
#include <vector>

namespace narrowgap {

/// Exit codes of the command-line driver.
enum ExitCode : int {
    exit_ok = 0,
    exit_usage = 1,
    exit_validation = 2, // also config, parse and domain errors
    exit_solver = 3,
    exit_gate = 4,
};

/// Run `narrowgap <command> [options]` with args excluding the program name.
/// Results go to `out`; errors are written to `err` as one JSON object.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace narrowgap

#endif

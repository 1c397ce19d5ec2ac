#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace zbus::cli {

enum ExitCode : int {
    kOk = 0,
    kInputError = 1,
    kNotConverged = 2,
    kInfeasible = 3,
};

/// Runs one zbuscert command. `args` excludes the program name.
int run_cli(std::vector<std::string> const& args, std::ostream& out, std::ostream& err);

}  // namespace zbus::cli

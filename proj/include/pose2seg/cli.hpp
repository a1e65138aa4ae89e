#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "pose2seg/error.hpp"

namespace pose2seg::cli {

enum ExitCode : int {
    ok = 0,
    internal = 1,
    usage = 2,
    io = 3,
    schema = 4,
    reference = 5,
    data = 6,
};

int exit_code_for(ErrorCode code);

/// Runs one subcommand. `args[0]` is the program name. Reports go to `out`;
/// failures are written to `err` as {"error": {code, exit_code, message}}.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace pose2seg::cli

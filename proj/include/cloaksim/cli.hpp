#pragma once

#include <ostream>

namespace cloaksim {

// Exit codes of the command-line tool.
enum ExitCode : int {
    exit_ok = 0,
    exit_config = 2,
    exit_numerical = 3,
    exit_io = 4,
};

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cloaksim

#pragma once

#include <ostream>

namespace mstool {

// Entry point of the `mstool` executable: parses argv, runs one subcommand
// and returns the process exit status. Diagnostics go to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mstool

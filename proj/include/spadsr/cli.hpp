#pragma once

#include <string>
#include <vector>

namespace spadsr::cli {

// Runs one subcommand. `args` excludes the program name. Returns 0 on
// success, 2 on bad arguments, 1 on runtime failure.
int run(const std::vector<std::string>& args);
int run(int argc, const char* const* argv);

}  // namespace spadsr::cli

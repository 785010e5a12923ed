#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bioace::cli {

/// Runs the command line (args excludes the program name). Returns the exit
/// code: 0 success, 2 invalid input, 3 endpoint failure.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bioace::cli

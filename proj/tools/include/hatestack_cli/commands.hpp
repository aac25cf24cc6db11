#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hatestack::cli {

/// Runs the command line `args` (args[0] is the program name). Returns the
/// process exit code: 0 success, 1 usage, 2 data or I/O, 3 numerical.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hatestack::cli

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace genremap {

// Runs one `genremap` subcommand. args excludes the program name.
// Returns 0 on success, 1 on a usage error and 2 on a data error.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_command(int argc, char** argv);

}  // namespace genremap

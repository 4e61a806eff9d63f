// cli.hpp - command-line front end. Exit codes: 0 success, 1 validation or
// runtime failure, 2 usage or configuration error; every error line on the
// error stream starts with "ERROR <code>:".

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace excitrans {

/// args[0] is the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace excitrans

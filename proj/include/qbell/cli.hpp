// cli.hpp
// Command-line surface. run_command is the whole program behind main(), kept
// callable so the command layer is testable in-process.
// Exit codes: 0 success, 2 usage error, 3 LP solver failure.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qbell {

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace qbell

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fermat::cli {

// Exit codes: 0 success, 1 verify found failing criteria or an I/O failure, 2 command line or scenario error,
// 3 numerical error raised by a solver.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

const std::vector<std::string>& run_kinds();

}  // namespace fermat::cli

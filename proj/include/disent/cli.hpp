#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace disent::cli {

// Dispatches one subcommand and writes the JSON run report to `out`.
// Exit status: 0 success, 2 computed-but-failed-verification, 1 input or
// contract error (single-line machine-parsable error JSON).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace disent::cli

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mum::cli {

/// Runs the `mum` command line with `args` (without the program name).
/// Returns the process exit status: 0 on success, 1 for rejected positions or
/// arguments, 2 for usage errors, 3 when a search runs out of budget.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace mum::cli

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tamed {

/// Entry point of the `tamed-euler` tool. `args` excludes the program name.
/// Exit codes: 0 success, 2 configuration error, 3 internal invariant violation.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tamed

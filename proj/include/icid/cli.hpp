#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace icid {

/// Runs one subcommand; `args` excludes the program name. Returns 0 on
/// success, 1 on a domain error (JSON error object on `err`) and 2 on a
/// usage error.
[[nodiscard]] int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace icid

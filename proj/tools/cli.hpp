#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lexirag::cli {

/// Exit status: 0 success, 1 runtime error, 2 usage error. Runtime errors are
/// written to `err` as one line `error<TAB>kind<TAB>message`.
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

} // namespace lexirag::cli

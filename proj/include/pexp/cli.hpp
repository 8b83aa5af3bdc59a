#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pexp::cli {

enum ExitCode : int {
  kOk = 0,
  kStructural = 1,  // malformed input, unsupported requests
  kNegative = 2,    // GKM violation, NotDescendable, NotInSpan and the like
};

// Runs one command line (without the program name). Results go to `out`,
// diagnostics for structural errors to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pexp::cli

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace optcompact::cli {

enum ExitCode { kOk = 0, kUsage = 1, kNumerical = 2, kAborted = 3 };

// args excludes the program name
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace optcompact::cli

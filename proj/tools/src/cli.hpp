// cli.hpp
// The mtvpar command line: simulate, fit, evaluate, benchmark, replay.

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace mtvpar::io {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitParse = 2,
  kExitMaxIter = 3,
};

// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mtvpar::io

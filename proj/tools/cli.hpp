#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace shapeot::cli {

// Exit codes of the command-line tool.
enum Exit : int {
  kOk = 0,
  kUsage = 1,
  kParse = 2,
  kDimension = 3,
  kUnsupportedP = 4,
  kSolver = 5,
  kAlgebra = 6,
};

// Runs the tool on argv[1..] and returns the exit code. Results go to `out`
// (or to --output), diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace shapeot::cli

#pragma once

#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace kgcoh::app {

enum ExitCode : int { kOk = 0, kNumerical = 1, kUsage = 2 };

// Bad flag values or combinations detected after parsing.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Inclusive range min, min + step, ... <= max.
struct Grid {
  double min = 0.0;
  double max = 0.0;
  double step = 1.0;

  std::vector<double> values(const std::string& name) const;
};

// Parses argv, runs the selected subcommand and returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace kgcoh::app

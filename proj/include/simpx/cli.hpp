#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace simpx::cli {

/// Exit codes; each error category also has its own message prefix.
enum ExitCode : int {
  kOk = 0,
  kUsage = 2,
  kIo = 3,
  kFormat = 4,
  kDims = 5,
  kValue = 6,
  kNumeric = 7,
};

/// Subcommands: phantom, render, raymap, backproject, reconstruct, metrics, export.
int run(int argc, char** argv);
/// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace simpx::cli

#pragma once

#include <iosfwd>

namespace ngkl::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kCheckFailed = 2,
  kRankDeficient = 3,
  kNonPositiveRate = 4,
};

/// Runs one `ngkl` invocation. Reports go to `out`, diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ngkl::cli

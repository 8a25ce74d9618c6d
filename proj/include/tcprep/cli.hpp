#pragma once

#include <ostream>
#include <vector>

namespace tcprep {

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitNumerical = 3, kExitCheckFail = 4 };

struct SlopeFit {
  bool valid = false;  // needs at least two distinct sizes
  double slope = 0.0;
  double intercept = 0.0;
  /// Standard error of the slope; only defined with three or more points.
  bool has_stderr = false;
  double stderr_slope = 0.0;
};

/// Least squares fit of log(gap) against log(L).
SlopeFit fit_log_log(const std::vector<int>& sizes, const std::vector<double>& gaps);

/// Entry point of the `tcprep` executable. Diagnostics go to `log`.
int run_cli(int argc, const char* const* argv, std::ostream& log);

}  // namespace tcprep

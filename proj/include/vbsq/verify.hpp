#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace vbsq {

struct VerifyOptions {
  bool fast = false;
  // Test hook: flips the sign of the LR transfer factor inside the
  // ground-overlap check so that the harness can be seen to fail.
  bool mutate_lr_sign = false;
};

struct CheckResult {
  std::string name;
  bool pass = false;
  double residual = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

std::vector<CheckResult> run_verify(const VerifyOptions& opt);

// Prints the pass/fail matrix, then up to 20 failures. Returns 0 when all pass, else 1.
int report_verify(const std::vector<CheckResult>& results, std::ostream& out);

}  // namespace vbsq

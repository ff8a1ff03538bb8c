#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace specclip {

/// One lemma check. `measured` and `bound` are the worst case found over the
/// check's lattice; the check passes when measured <= bound.
struct CheckResult {
  std::string group;
  std::string name;
  double measured = 0.0;
  double bound = 0.0;
  std::size_t cases = 0;
  bool pass = false;
  std::string detail;
};

struct VerifyReport {
  std::vector<CheckResult> checks;
  bool all_pass() const;
  std::size_t failures() const;
};

struct VerifyOptions {
  std::size_t mc_draws = 1'000'000;
  std::uint64_t seed = 20240917;
  /// Number of g-grid points for the relative-bias checks (0 is skipped).
  std::size_t bias_grid = 41;
  double mc_slack_se = 5.0;
};

VerifyReport run_lemma_suite(const VerifyOptions& options = {});

}  // namespace specclip

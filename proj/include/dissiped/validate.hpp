#pragma once

// The acceptance checks behind `dissiped validate` and the acceptance test
// binary: one entry per criterion, each returning pass/fail plus a detail
// line with the measured margins.

#include <string>
#include <vector>

namespace dissiped {

struct CheckResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Runs every acceptance check whose name contains `filter` (all when
/// empty), in criterion order. Deterministic.
std::vector<CheckResult> run_acceptance(const std::string& filter = "");

}  // namespace dissiped

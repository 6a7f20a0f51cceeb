#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace tubeforge::acceptance {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;    // deterministic: no timings
  double seconds = 0.0;  // wall time, reported separately
};

/// Criteria 1-10 on the Cantor spray, the unit-square spray and the
/// auxiliary ratio lists. Criterion 11 (determinism of `selftest`) needs a
/// separate process and lives in the acceptance test binary.
std::vector<CriterionResult> run_all();

/// One "[PASS] ..." / "[FAIL] ..." line per criterion. Timings are only
/// included when requested, so the default report is reproducible.
void write_report(std::ostream& out, const std::vector<CriterionResult>& results,
                  bool with_timing = false);

bool all_passed(const std::vector<CriterionResult>& results);

}  // namespace tubeforge::acceptance

#pragma once

// Acceptance harness: ten numbered end-to-end checks covering the oracle
// cross-validations, equilibrium constants, range-bound properties, the
// studied parameter regimes, and artifact determinism.  The same runner backs
// the `validate` CLI verb and the acceptance test binary.

#include <cstdio>
#include <string>
#include <vector>

namespace aci {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  // Criterion 9 is a documented qualitative report: it is recorded but does
  // not gate the suite.
  bool gating = true;
  double seconds = 0.0;
  std::string detail;  // one-line metrics summary (or the failure reason)
};

struct ValidationOptions {
  // Where the qualitative report and scratch artifact directories go.
  std::string work_dir = "acceptance-out";
  // Run only these criterion ids (empty = all ten).
  std::vector<int> only;
};

std::vector<CriterionResult> run_acceptance(const ValidationOptions& opt = {});

// One `[PASS]`/`[FAIL]` line per criterion.
void print_results(const std::vector<CriterionResult>& results,
                   std::FILE* out);

bool all_gating_passed(const std::vector<CriterionResult>& results);

}  // namespace aci

#pragma once
// Invariant suites behind `cmm verify`: decomposition identity, K_mode
// truth table, gradient checks, temperature identity and the AP oracle.

#include <string>
#include <vector>

namespace cmm::selfcheck {

struct SuiteResult {
  std::string name;
  bool passed = false;
  std::string detail;  // first counterexample when failing
};

SuiteResult decomposition_identity();
SuiteResult k_mode_truth_table();
SuiteResult gradient_check();
SuiteResult temperature_identity();
SuiteResult ap_oracle();

// Runs every suite, prints one pass/fail line each; true iff all pass.
bool run_all();

}  // namespace cmm::selfcheck

#pragma once

#include <cstdint>
#include <string>
#include <vector>

// Invariant suites behind the selftest mode, shared with the acceptance
// gate.  Every suite is deterministic under the given seed; depth bounds the
// exhaustive digit-class enumeration and margin widens the shell boxes of
// the exhaustive searches.

namespace kappa::selftest {

struct SuiteResult {
  std::string name;
  bool pass = false;
  long checks = 0;   // individual comparisons performed
  std::string note;  // short summary, no timing so reports stay byte-stable
};

std::vector<SuiteResult> run_all(std::uint64_t seed, int depth, int margin);

// Harness meta-test: plant a sign error in one condition and require the
// equivalence comparison to notice.  pass means the fault WAS caught.
SuiteResult run_fault_injection(std::uint64_t seed);

// Individual suites, reused by the acceptance gate.
SuiteResult run_field_axioms(std::uint64_t seed);
SuiteResult run_extension_structure(std::uint64_t seed);
SuiteResult run_symmetric_space(std::uint64_t seed);
SuiteResult run_counting();
SuiteResult run_degeneracy_searches(int margin);

// Heavier equivalence runs for the acceptance gate: n random points at one
// realized parameter cell, and every digit class of (c, d, r1, r2) at the
// given truncation depths over the two reference cells.
SuiteResult run_equivalence_cell(std::uint64_t seed, long q, long vm, long vp,
                                 long n_random);
SuiteResult run_equivalence_classes(int cd_depth, int unit_depth);

}  // namespace kappa::selftest

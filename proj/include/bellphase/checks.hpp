#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace bellphase::checks {

struct CheckResult {
  std::string name;
  bool passed = false;
  double max_error = 0.0;  // largest deviation seen, in the check's own units
  double tolerance = 0.0;
  std::uint64_t cases = 0;
};

// Built-in invariant suite: algebra structure constants against Pauli matrices,
// pseudoscalar identities, rotor composition, the rotor-product route against
// the cos^2 form, multi-rotator reduction and common-shift invariance.
// Random cases are drawn from a fixed seed.
std::vector<CheckResult> run_invariant_suite(std::uint64_t seed = 20120601);

bool all_passed(const std::vector<CheckResult> &results);

}  // namespace bellphase::checks

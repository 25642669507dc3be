#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "smoothdist/dag.hpp"

namespace smoothdist {

struct CheckResult {
  std::string name;
  bool pass = true;
  bool informational = false;  // reported, never counted as a failure
  double measured = 0.0;
  std::string detail;
};

struct VerifyReport {
  std::vector<CheckResult> checks;
  bool all_pass() const;
  std::string to_string() const;  // one line per check
};

// Re-checks the structure's invariants on fresh samples: structural sanity,
// packing disjointness, coverage at every level, patch coverage of the
// base, facet accuracy, the sandwich property of the blended field, weight
// normalization, gradient consistency, coefficient bounds, continuity
// along segments, and descent reachability.  Informational rows report
// depth, minimum shape radius, and fan-out.
VerifyReport run_verification(const DistanceDag& dag, int samples = 4000,
                              std::uint64_t seed = 9999);

}  // namespace smoothdist

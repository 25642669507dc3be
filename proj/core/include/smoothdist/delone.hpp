#pragma once

#include <cstdint>
#include <vector>

#include "smoothdist/config.hpp"
#include "smoothdist/ellipsoid.hpp"
#include "smoothdist/lifted_body.hpp"

namespace smoothdist {

// A selected center with its three ellipsoid scales.  All three are
// scalings of the one largest inscribed ellipsoid of the unit Macbeath
// region at x with respect to the expanded body.
struct DelonePoint {
  Vector x;
  Ellipsoid covering;       // scale lambda_c
  Ellipsoid packing;        // scale lambda_p
  Ellipsoid half_covering;  // scale lambda_c / 2
};

// Greedy center selection over a deterministic low-discrepancy sample of
// the body: a sample point becomes a center when no previous packing
// ellipsoid meets its own; accepted centers mark every sample point inside
// their half-covering ellipsoid as covered.  A fresh verification sample
// then has any uncovered witness inserted directly, which makes the
// half-covering ellipsoids cover the body up to sampling resolution.
//
// `body` is the lifted body itself; `expanded` the delta-raised version the
// Macbeath regions are measured against.  `delta` also sets the worklist
// size: worklist_factor * delta^{-(ambient)/2}.
std::vector<DelonePoint> build_delone_set(const LiftedBody& body,
                                          const LiftedBody& expanded,
                                          double lambda_p, double lambda_c,
                                          std::uint64_t seed,
                                          const RunConfig& cfg);

}  // namespace smoothdist

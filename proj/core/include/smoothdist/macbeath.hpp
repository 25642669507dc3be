#pragma once

#include <vector>

#include "smoothdist/ellipsoid.hpp"
#include "smoothdist/lifted_body.hpp"
#include "smoothdist/polytope.hpp"

namespace smoothdist {

// Symmetric slab |a.(y - center)| <= halfwidth with unit normal a.
struct Slab {
  Vector a;
  double halfwidth = 0.0;
};

// Intersection of the body with its reflection about an interior point x,
// shrunk by lambda about x: for each body constraint with slack s_j at x,
// the slab |a_j.(y - x)| <= lambda * s_j.
struct MacbeathRegion {
  Vector center;
  double lambda = 0.0;
  std::vector<Slab> slabs;

  bool contains(const Vector& y, double tol = 0.0) const;
  // The 2n halfspaces of the slab intersection in global form.
  std::vector<Halfspace> halfspaces() const;
};

// Throws PointNotInterior when some slack at x is non-positive, and
// NonPositiveLambda unless 0 < lambda <= 1.
MacbeathRegion macbeath_region(const Polytope& body, const Vector& x,
                               double lambda);
MacbeathRegion macbeath_region(const LiftedBody& body, const Vector& x,
                               double lambda);

// Largest-volume ellipsoid centered at region.center inscribed in the slab
// intersection: maximize log det Q subject to a_j^T Q a_j <= halfwidth_j^2,
// solved with a log-barrier Newton iteration to relative accuracy rel_tol.
// Throws DegenerateRegion for hairline slabs and SolverFailure when the
// iteration cannot reach its target.
Ellipsoid inscribed_ellipsoid(const MacbeathRegion& region,
                              double rel_tol = 1e-6);

}  // namespace smoothdist

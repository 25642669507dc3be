#pragma once

#include "smoothdist/ellipsoid.hpp"

namespace smoothdist {

// Blending unit: the vertical shadow of a highest-reach ellipsoid together
// with the facet whose slack stands in for the boundary distance there.
struct Patch {
  int node = -1;        // index into the finest level
  Ellipsoid projected;  // shadow of the covering ellipsoid in base space
  int rep_index = -1;   // facet index of the representative hyperplane
};

}  // namespace smoothdist

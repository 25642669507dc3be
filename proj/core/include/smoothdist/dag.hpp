#pragma once

#include <cstdint>
#include <vector>

#include "smoothdist/config.hpp"
#include "smoothdist/ellipsoid.hpp"
#include "smoothdist/linalg.hpp"
#include "smoothdist/patch.hpp"
#include "smoothdist/polytope.hpp"

namespace smoothdist {

// One center of a level's net.  The packing and half-covering ellipsoids
// are fixed rescalings of the covering one (lambda_p/lambda_c and 1/2), so
// only the covering shape needs to be persisted.
struct DagNode {
  Vector center;            // ambient point of the lifted body
  Ellipsoid covering;
  Ellipsoid packing;
  Ellipsoid half_covering;
  std::vector<int> children;  // indices one level down; empty on level 0
  bool is_top = false;
  int patch_id = -1;   // index into DistanceDag::patches when is_top
  int rep_index = -1;  // base facet owning this leaf (level 0 only)
  // Patch ids whose base shadow can overlap this leaf's shadow (level 0).
  std::vector<int> adjacent_patches;
};

struct DagLevel {
  double delta = 0.0;  // expansion used when fitting this level's shapes
  std::vector<DagNode> nodes;
};

struct BuildStats {
  std::vector<int> level_sizes;  // finest level first
  int num_patches = 0;
  int max_out_degree = 0;
  double build_seconds = 0.0;
};

// Search structure over nets of a lifted body at doubling expansion scales.
// Level 0 is the finest net, the last level holds a single root.  All node
// geometry lives in normalized coordinates (unit diameter, origin at the
// Chebyshev center); `transform` maps original points into that frame.
struct DistanceDag {
  DistanceDag(Polytope original_, Polytope normalized_,
              NormalizationTransform transform_)
      : original(std::move(original_)),
        normalized(std::move(normalized_)),
        transform(transform_) {}

  Polytope original;
  Polytope normalized;
  NormalizationTransform transform;
  double epsilon = 0.0;
  std::uint64_t seed = 0;
  double lambda_c = 0.0;  // resolved scaling factors
  double lambda_p = 0.0;
  RunConfig config;
  std::vector<DagLevel> levels;
  std::vector<Patch> patches;
  BuildStats stats;

  int base_dim() const { return normalized.dim(); }
  int depth() const { return int(levels.size()); }
  std::size_t node_count() const {
    std::size_t n = 0;
    for (const DagLevel& l : levels) n += l.nodes.size();
    return n;
  }
};

// Build the full structure for a bounded polytope with nonempty interior.
// Throws InvalidInput (epsilon outside (0, 1/2)), UnboundedPolytope,
// EmptyInterior, SolverFailure, CoverageFailure, or
// RepresentativeValidationFailure when a leaf's facet fails its accuracy
// check on samples of its own patch.
DistanceDag build_dag(const Polytope& p, const RunConfig& cfg);

// Walk from the root to level 0 along the vertical line through x
// (normalized base coordinates), at each level picking the child whose
// covering ellipsoid reaches highest over x.  Returns the level-0 node
// index.  Throws OutsidePolytope when the line escapes every candidate.
int ray_shoot_descend(const DistanceDag& dag, const Vector& x);

// Ids of the patches whose base shadow strictly contains x, collected from
// the descent leaf's adjacency list.  Throws OutsidePolytope when empty.
std::vector<int> patches_at(const DistanceDag& dag, const Vector& x);

}  // namespace smoothdist

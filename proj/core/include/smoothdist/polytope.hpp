#pragma once

#include <string>
#include <vector>

#include "smoothdist/config.hpp"
#include "smoothdist/linalg.hpp"

namespace smoothdist {

// Closed halfspace {x : a.dot(x) <= b} with unit normal a.
struct Halfspace {
  Vector a;
  double b = 0.0;
};

// Affine map x -> scale * (x - translation) taking a body to unit diameter
// with its largest inscribed ball centered at the origin.
struct NormalizationTransform {
  double scale = 1.0;
  Vector translation;

  Vector apply(const Vector& x) const { return scale * (x - translation); }
  Vector invert(const Vector& x) const { return x / scale + translation; }
  // Distances measured in normalized coordinates shrink by `scale`.
  double distance_to_original(double d) const { return d / scale; }
};

// Bounded full-dimensional intersection of halfspaces.  Construction
// normalizes the facet normals to unit length (rescaling offsets to keep
// the geometry); it does not drop redundant halfspaces and does not check
// boundedness (see normalize / bounding_box for that).
class Polytope {
 public:
  Polytope(int dim, std::vector<Halfspace> halfspaces,
           double unit_normal_tol = Tolerances{}.unit_normal);

  int dim() const { return dim_; }
  int num_halfspaces() const { return int(b_.size()); }
  const std::vector<Halfspace>& halfspaces() const { return hs_; }
  const Matrix& A() const { return A_; }  // rows are the unit normals
  const Vector& b() const { return b_; }

  double slack(int j, const Vector& x) const;
  double min_slack(const Vector& x) const;
  bool contains(const Vector& x, double tol) const;

  // Distance from an interior point to the boundary: min_j (b_j - a_j.x).
  // Exact for any halfspace description, redundant facets included.
  // Throws PointOutside when some slack is below -membership_tol.
  double exact_boundary_distance(const Vector& x,
                                 double membership_tol = 1e-12) const;

 private:
  int dim_;
  std::vector<Halfspace> hs_;
  Matrix A_;
  Vector b_;
};

struct BoundingBox {
  Vector lo;
  Vector hi;
};

// Axis-aligned bounds via 2*dim support LPs.  Throws UnboundedPolytope.
BoundingBox bounding_box(const Polytope& p);

struct ChebyshevBall {
  Vector center;
  double radius = 0.0;
};

// Center and radius of a largest inscribed ball (one LP).
// Throws UnboundedPolytope / EmptyInterior.
ChebyshevBall chebyshev_ball(const Polytope& p,
                             double interior_tol = Tolerances{}.geometric);

// All vertices of the halfspace intersection, deduplicated.  Cost grows as
// C(#halfspaces, dim); meant for small systems (dim <= 4).
std::vector<Vector> enumerate_vertices(const Matrix& A, const Vector& b,
                                       double feas_tol = 1e-9,
                                       double dedupe_tol = 1e-7);

// Largest pairwise vertex distance when dim <= 3 and facets <= 128,
// otherwise the best width over 1000 deterministic support directions.
// `exact` (optional) reports which path ran.
double diameter(const Polytope& p, bool* exact = nullptr);

struct NormalizedPolytope {
  Polytope polytope;
  NormalizationTransform transform;
};

// Translate the Chebyshev center to the origin and rescale to unit
// diameter.  Throws UnboundedPolytope / EmptyInterior.
NormalizedPolytope normalize(const Polytope& p);

// Step length t >= 0 with x + t*dir on the boundary, for interior x and a
// nonzero direction.  Throws PointOutside / InvalidInput.
double boundary_hit(const Polytope& p, const Vector& x, const Vector& dir);

// JSON import/export: {"dim": d, "halfspaces": [{"a": [...], "b": ...}]}.
Polytope polytope_from_json_text(const std::string& text);
Polytope load_polytope(const std::string& path);
std::string polytope_to_json_text(const Polytope& p);
void save_polytope(const Polytope& p, const std::string& path);

}  // namespace smoothdist

#pragma once

#include "smoothdist/polytope.hpp"

namespace smoothdist {

// The body in R^{d+1} whose points (x, z) satisfy z <= delta + b_j - a_j.x
// for every base halfspace, plus optionally the ground constraint z >= 0.
// With delta = 0 and the ground present, the height of the upper envelope
// over an interior x equals the base boundary distance at x.
class LiftedBody {
 public:
  LiftedBody(Polytope base, double delta, bool ground);

  const Polytope& base() const { return base_; }
  double delta() const { return delta_; }
  bool has_ground() const { return ground_; }
  int base_dim() const { return base_.dim(); }
  int ambient_dim() const { return base_.dim() + 1; }

  // Upper constraints come first, the ground constraint (if any) last.
  int num_halfspaces() const {
    return base_.num_halfspaces() + (ground_ ? 1 : 0);
  }
  // Constraint j in unit-normal halfspace form over R^{d+1}.
  Halfspace halfspace(int j) const;
  // Euclidean slack of constraint j at y (unit-normal form).
  double slack(int j, const Vector& y) const;
  double min_slack(const Vector& y) const;
  bool contains(const Vector& y, double tol) const;

  // Height of the upper envelope over base point x:
  // min_j (delta + b_j - a_j.x).  Negative outside the envelope's support.
  double envelope(const Vector& x) const;

  // Length of the vertical ray from q = (x, z) up to the envelope,
  // min_j (delta + b_j - a_j.x - z).  The ground does not participate.
  // Throws PointOutside if q is outside the body by more than tol.
  double ray_up_distance(const Vector& q, double tol = 1e-9) const;

 private:
  Polytope base_;
  double delta_;
  bool ground_;
  double lift_norm_;  // |(a_j, 1)| for unit base normals: sqrt(2)
};

// Wrap a normalized polytope (origin strictly interior) with delta = 0 and
// the ground constraint.  Throws InvalidInput otherwise.
LiftedBody lift(const Polytope& p);

// Raise every upper constraint of a freshly lifted body by delta > 0 and
// drop the ground.  Throws NonPositiveDelta / InvalidInput.
LiftedBody expand(const LiftedBody& l, double delta);

}  // namespace smoothdist

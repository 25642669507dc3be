#include "smoothdist/lifted_body.hpp"

#include <cmath>
#include <limits>

#include "smoothdist/errors.hpp"

namespace smoothdist {

LiftedBody::LiftedBody(Polytope base, double delta, bool ground)
    : base_(std::move(base)),
      delta_(delta),
      ground_(ground),
      lift_norm_(std::sqrt(2.0)) {}

Halfspace LiftedBody::halfspace(int j) const {
  const int d = base_.dim();
  Halfspace h;
  h.a.resize(d + 1);
  if (j < base_.num_halfspaces()) {
    // z <= delta + b_j - a_j.x  <=>  (a_j, 1).(x, z) <= b_j + delta.
    h.a.head(d) = base_.halfspaces()[size_t(j)].a / lift_norm_;
    h.a[d] = 1.0 / lift_norm_;
    h.b = (base_.halfspaces()[size_t(j)].b + delta_) / lift_norm_;
  } else {
    h.a.setZero();
    h.a[d] = -1.0;
    h.b = 0.0;
  }
  return h;
}

double LiftedBody::slack(int j, const Vector& y) const {
  const int d = base_.dim();
  if (j < base_.num_halfspaces()) {
    double dot = 0.0;
    for (int k = 0; k < d; ++k) dot += base_.A()(j, k) * y[k];
    return (base_.b()[j] + delta_ - dot - y[d]) / lift_norm_;
  }
  return y[d];
}

double LiftedBody::min_slack(const Vector& y) const {
  double best = std::numeric_limits<double>::infinity();
  const int n = num_halfspaces();
  for (int j = 0; j < n; ++j) best = std::min(best, slack(j, y));
  return best;
}

bool LiftedBody::contains(const Vector& y, double tol) const {
  return min_slack(y) >= -tol;
}

double LiftedBody::envelope(const Vector& x) const {
  const int d = base_.dim();
  const int n = base_.num_halfspaces();
  double best = std::numeric_limits<double>::infinity();
  for (int j = 0; j < n; ++j) {
    double dot = 0.0;
    for (int k = 0; k < d; ++k) dot += base_.A()(j, k) * x[k];
    best = std::min(best, base_.b()[j] + delta_ - dot);
  }
  return best;
}

double LiftedBody::ray_up_distance(const Vector& q, double tol) const {
  if (!contains(q, tol)) throw PointOutside("ray origin outside the lifted body");
  Vector x = q.head(base_.dim());
  return envelope(x) - q[base_.dim()];
}

LiftedBody lift(const Polytope& p) {
  for (const Halfspace& h : p.halfspaces()) {
    if (!(h.b > 0.0)) {
      throw InvalidInput("lift expects a normalized polytope with the origin interior");
    }
  }
  return LiftedBody(p, 0.0, true);
}

LiftedBody expand(const LiftedBody& l, double delta) {
  if (!(delta > 0.0)) throw NonPositiveDelta("expansion requires delta > 0");
  if (l.delta() != 0.0 || !l.has_ground()) {
    throw InvalidInput("expand applies to a freshly lifted body");
  }
  return LiftedBody(l.base(), delta, false);
}

}  // namespace smoothdist

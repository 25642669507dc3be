#pragma once

#include <optional>
#include <utility>

#include "smoothdist/linalg.hpp"

namespace smoothdist {

// Full-dimensional ellipsoid {x : (x-c)^T M (x-c) <= 1} with M symmetric
// positive definite.  Construction caches the inverse, a Cholesky factor of
// the inverse (mapping the unit ball onto the ellipsoid), the extreme
// principal radii, and per-axis bounding-box halfwidths.
class Ellipsoid {
 public:
  // Validating constructor: throws InvalidInput unless M is symmetric
  // positive definite (up to sym_tol on the asymmetry).
  static Ellipsoid create(Vector c, Matrix M, double sym_tol = 1e-9);
  // Lenient constructor for data loaded from disk: never throws on bad
  // shape matrices, records the defect in valid() instead.
  static Ellipsoid unchecked(Vector c, Matrix M);

  bool valid() const { return valid_; }
  int dim() const { return int(c_.size()); }
  const Vector& center() const { return c_; }
  const Matrix& M() const { return M_; }
  const Matrix& Q() const { return Q_; }          // M^{-1}
  const Matrix& ball_map() const { return L_; }   // L L^T = Q
  double rmin() const { return rmin_; }
  double rmax() const { return rmax_; }
  double bbox_halfwidth(int k) const { return bbox_[k]; }

  // Quadratic value (x-c)^T M (x-c); < 1 inside, 1 on the boundary.
  double value(const Vector& x) const;
  bool contains(const Vector& x, double tol = 0.0) const;

  // Same center, radii multiplied by lambda.  Throws NonPositiveLambda.
  Ellipsoid scaled(double lambda) const;

  // Intersection with the vertical line through base point x (the last
  // coordinate is the vertical axis; x has dim()-1 entries).  Returns
  // (z_low, z_high) or nullopt when the line misses.
  std::optional<std::pair<double, double>> vertical_line_hit(
      const Vector& x) const;

  // Shadow under dropping the last coordinate: the Schur complement
  // M_xx - M_xz M_zz^{-1} M_zx over the leading block.
  Ellipsoid project_vertical() const;

  // Empty placeholder; valid() stays false until a factory fills it.
  Ellipsoid() = default;

 private:
  void fill_caches();

  Vector c_;
  Matrix M_;
  Matrix Q_;
  Matrix L_;
  Vector bbox_;
  double rmin_ = 0.0;
  double rmax_ = 0.0;
  bool valid_ = false;
};

// Read-only ellipsoid backed by caller-owned flat storage (center, shape
// matrix, ball map each col-major and contiguous).  Linking packs whole
// levels this way so the pair predicate streams plain arrays instead of
// chasing per-node allocations.
class EllipsoidRef {
 public:
  EllipsoidRef(const double* c, const double* M, const double* L, int d,
               double rmin, double rmax)
      : c_(c, d), M_(M, d, d), L_(L, d, d), rmin_(rmin), rmax_(rmax) {}

  int dim() const { return int(c_.size()); }
  const Eigen::Map<const Vector>& center() const { return c_; }
  const Eigen::Map<const Matrix>& M() const { return M_; }
  const Eigen::Map<const Matrix>& ball_map() const { return L_; }
  double rmin() const { return rmin_; }
  double rmax() const { return rmax_; }

 private:
  Eigen::Map<const Vector> c_;
  Eigen::Map<const Matrix> M_;
  Eigen::Map<const Matrix> L_;
  double rmin_;
  double rmax_;
};

// Exact intersection test (up to `tol` on the decision value): minimizes
// the first ellipsoid's quadratic over the second ellipsoid by a monotone
// search over the path x(u) = (M1 + u M2)^{-1} (M1 c1 + u M2 c2).
bool ellipsoids_intersect(const Ellipsoid& e1, const Ellipsoid& e2,
                          double tol = 1e-9);
bool ellipsoids_intersect(const EllipsoidRef& e1, const EllipsoidRef& e2,
                          double tol = 1e-9);

// Containment of `inner` in `outer`: maximizes the outer quadratic over the
// inner ellipsoid through the secular equation of the sphere-constrained
// quadratic, exact up to `tol`.
bool ellipsoid_contains_ellipsoid(const Ellipsoid& outer,
                                  const Ellipsoid& inner, double tol = 1e-9);

}  // namespace smoothdist

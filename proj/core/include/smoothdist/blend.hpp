#pragma once

#include <vector>

#include "smoothdist/dag.hpp"
#include "smoothdist/linalg.hpp"

namespace smoothdist {

// Bump profile exp(-1/(1-s^2)) inside (-1, 1), zero outside.
double mollifier(double s);

// mollifier(s) * s / (s^2 - 1)^2, the profile factor appearing in the
// gradient correction.  Bounded by 1/2 on (-1, 1); throws DomainError
// outside the open interval.
double kappa(double s);

// Per-patch weights at a base point, all in normalized coordinates.
// psi values below the flush cutoff are exactly zero.
struct WeightInfo {
  std::vector<int> patch_ids;
  std::vector<double> f;    // quadratic value of each patch shadow
  std::vector<double> psi;  // mollified weights
  std::vector<double> phi;  // psi / psi_sum, sums to one
  double psi_sum = 0.0;
};

// Weights over an explicit patch list.  Throws EmptyPatchList when the list
// is empty and OutsidePolytope when every weight flushes to zero.
WeightInfo blend_weights_for(const DistanceDag& dag,
                             const std::vector<int>& patch_ids,
                             const Vector& x);

// Weights over the patches found through descent (patches_at).
WeightInfo blend_weights(const DistanceDag& dag, const Vector& x);

// The smooth distance field: a weight-blended combination of the owning
// facets' slacks.  Never below the true boundary distance, never above it
// by more than epsilon (unit-diameter frame).  Normalized coordinates.
double blend_value(const DistanceDag& dag, const Vector& x);

// Closed-form gradient of blend_value.
Vector blend_gradient(const DistanceDag& dag, const Vector& x);

// Hessian by central differences of the closed-form gradient, symmetrized.
Matrix blend_hessian_fd(const DistanceDag& dag, const Vector& x,
                        double h = 1e-5);

// Scalar coefficient of each patch's gradient-correction term,
// 4 (v_i - value) psi_i f_i / ((f_i^2 - 1)^2 psi_sum), aligned with the
// entries of blend_weights(dag, x).
std::vector<double> blend_gradient_coefficients(const DistanceDag& dag,
                                                const Vector& x);

// Same field expressed over the original (pre-normalization) frame.
double blend_value_original(const DistanceDag& dag, const Vector& x);
Vector blend_gradient_original(const DistanceDag& dag, const Vector& x);
Matrix blend_hessian_original(const DistanceDag& dag, const Vector& x,
                              double h = 1e-5);

}  // namespace smoothdist

#include "smoothdist/blend.hpp"

#include <cmath>

#include "smoothdist/errors.hpp"

namespace smoothdist {
namespace {

// Blends the owning facets' slacks with the weights already computed.
double value_from(const DistanceDag& dag, const WeightInfo& w,
                  const Vector& x) {
  double value = 0.0;
  for (size_t i = 0; i < w.patch_ids.size(); ++i) {
    if (w.phi[i] == 0.0) continue;
    const int rep = dag.patches[size_t(w.patch_ids[i])].rep_index;
    value += w.phi[i] * dag.normalized.slack(rep, x);
  }
  return value;
}

}  // namespace

double mollifier(double s) {
  if (std::abs(s) >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - s * s));
}

double kappa(double s) {
  if (std::abs(s) >= 1.0) {
    throw DomainError("kappa is defined on the open interval (-1, 1)");
  }
  const double den = (s * s - 1.0) * (s * s - 1.0);
  return mollifier(s) * s / den;
}

WeightInfo blend_weights_for(const DistanceDag& dag,
                             const std::vector<int>& patch_ids,
                             const Vector& x) {
  if (patch_ids.empty()) throw EmptyPatchList("no patches to blend");
  WeightInfo w;
  w.patch_ids = patch_ids;
  w.f.reserve(patch_ids.size());
  w.psi.reserve(patch_ids.size());
  w.phi.reserve(patch_ids.size());
  const double cutoff = 1.0 - dag.config.tol.mollifier_cutoff;
  for (int pid : patch_ids) {
    const double f = dag.patches[size_t(pid)].projected.value(x);
    const double psi = f >= cutoff ? 0.0 : mollifier(f);
    w.f.push_back(f);
    w.psi.push_back(psi);
    w.psi_sum += psi;
  }
  if (!(w.psi_sum > 0.0)) {
    throw OutsidePolytope("every blend weight vanishes at the query point");
  }
  for (double psi : w.psi) w.phi.push_back(psi / w.psi_sum);
  return w;
}

WeightInfo blend_weights(const DistanceDag& dag, const Vector& x) {
  return blend_weights_for(dag, patches_at(dag, x), x);
}

double blend_value(const DistanceDag& dag, const Vector& x) {
  const WeightInfo w = blend_weights(dag, x);
  return value_from(dag, w, x);
}

Vector blend_gradient(const DistanceDag& dag, const Vector& x) {
  const WeightInfo w = blend_weights(dag, x);
  const double value = value_from(dag, w, x);
  Vector g = Vector::Zero(x.size());
  for (size_t i = 0; i < w.patch_ids.size(); ++i) {
    if (w.psi[i] == 0.0) continue;
    const Patch& patch = dag.patches[size_t(w.patch_ids[i])];
    const double v = dag.normalized.slack(patch.rep_index, x);
    g -= w.phi[i] * dag.normalized.halfspaces()[size_t(patch.rep_index)].a;
    const double f = w.f[i];
    const double den = (f * f - 1.0) * (f * f - 1.0);
    const double coef = 4.0 * (v - value) * w.psi[i] * f / (den * w.psi_sum);
    const Ellipsoid& e = patch.projected;
    g -= coef * (e.M() * (x - e.center()));
  }
  return g;
}

Matrix blend_hessian_fd(const DistanceDag& dag, const Vector& x, double h) {
  const int d = int(x.size());
  Matrix H(d, d);
  Vector xp = x, xm = x;
  for (int j = 0; j < d; ++j) {
    xp[j] = x[j] + h;
    xm[j] = x[j] - h;
    H.col(j) = (blend_gradient(dag, xp) - blend_gradient(dag, xm)) / (2.0 * h);
    xp[j] = x[j];
    xm[j] = x[j];
  }
  return 0.5 * (H + H.transpose());
}

std::vector<double> blend_gradient_coefficients(const DistanceDag& dag,
                                                const Vector& x) {
  const WeightInfo w = blend_weights(dag, x);
  const double value = value_from(dag, w, x);
  std::vector<double> out(w.patch_ids.size(), 0.0);
  for (size_t i = 0; i < w.patch_ids.size(); ++i) {
    if (w.psi[i] == 0.0) continue;
    const Patch& patch = dag.patches[size_t(w.patch_ids[i])];
    const double v = dag.normalized.slack(patch.rep_index, x);
    const double f = w.f[i];
    const double den = (f * f - 1.0) * (f * f - 1.0);
    out[i] = 4.0 * (v - value) * w.psi[i] * f / (den * w.psi_sum);
  }
  return out;
}

double blend_value_original(const DistanceDag& dag, const Vector& x) {
  const double v = blend_value(dag, dag.transform.apply(x));
  return dag.transform.distance_to_original(v);
}

Vector blend_gradient_original(const DistanceDag& dag, const Vector& x) {
  return blend_gradient(dag, dag.transform.apply(x));
}

Matrix blend_hessian_original(const DistanceDag& dag, const Vector& x,
                              double h) {
  return dag.transform.scale * blend_hessian_fd(dag, dag.transform.apply(x), h);
}

}  // namespace smoothdist

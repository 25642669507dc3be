#include "smoothdist/macbeath.hpp"

#include <cmath>
#include <limits>

#include "smoothdist/errors.hpp"

namespace smoothdist {

bool MacbeathRegion::contains(const Vector& y, double tol) const {
  for (const Slab& s : slabs) {
    if (std::abs(s.a.dot(y - center)) > s.halfwidth + tol) return false;
  }
  return true;
}

std::vector<Halfspace> MacbeathRegion::halfspaces() const {
  std::vector<Halfspace> hs;
  hs.reserve(slabs.size() * 2);
  for (const Slab& s : slabs) {
    hs.push_back({s.a, s.a.dot(center) + s.halfwidth});
    hs.push_back({-s.a, -s.a.dot(center) + s.halfwidth});
  }
  return hs;
}

namespace {

MacbeathRegion region_from_slacks(Vector x, double lambda,
                                  std::vector<Slab> slabs) {
  MacbeathRegion r;
  r.center = std::move(x);
  r.lambda = lambda;
  r.slabs = std::move(slabs);
  return r;
}

void check_lambda(double lambda) {
  if (!(lambda > 0.0) || lambda > 1.0) {
    throw NonPositiveLambda("macbeath shrinkage must lie in (0, 1]");
  }
}

}  // namespace

MacbeathRegion macbeath_region(const Polytope& body, const Vector& x,
                               double lambda) {
  check_lambda(lambda);
  std::vector<Slab> slabs;
  slabs.reserve(size_t(body.num_halfspaces()));
  for (int j = 0; j < body.num_halfspaces(); ++j) {
    const double s = body.slack(j, x);
    if (!(s > 0.0)) throw PointNotInterior("macbeath center is not strictly interior");
    slabs.push_back({body.halfspaces()[size_t(j)].a, lambda * s});
  }
  return region_from_slacks(x, lambda, std::move(slabs));
}

MacbeathRegion macbeath_region(const LiftedBody& body, const Vector& x,
                               double lambda) {
  check_lambda(lambda);
  std::vector<Slab> slabs;
  slabs.reserve(size_t(body.num_halfspaces()));
  for (int j = 0; j < body.num_halfspaces(); ++j) {
    const double s = body.slack(j, x);
    if (!(s > 0.0)) throw PointNotInterior("macbeath center is not strictly interior");
    slabs.push_back({body.halfspace(j).a, lambda * s});
  }
  return region_from_slacks(x, lambda, std::move(slabs));
}

Ellipsoid inscribed_ellipsoid(const MacbeathRegion& region, double rel_tol) {
  const int d = int(region.center.size());
  const int m = int(region.slabs.size());
  if (m < d) throw DegenerateRegion("not enough slabs to bound an ellipsoid");

  double wmin = std::numeric_limits<double>::infinity();
  double wmax = 0.0;
  for (const Slab& s : region.slabs) {
    wmin = std::min(wmin, s.halfwidth);
    wmax = std::max(wmax, s.halfwidth);
  }
  if (!(wmin > 0.0) || wmin < 1e-13 * wmax) {
    throw DegenerateRegion("slab halfwidths are degenerate");
  }

  // Normalized rows g_j = a_j / halfwidth_j turn the slab constraints into
  // g_j^T Q g_j <= 1, linear in the symmetric unknown Q.
  Matrix G(m, d);
  for (int j = 0; j < m; ++j) {
    G.row(j) = region.slabs[size_t(j)].a.transpose() / region.slabs[size_t(j)].halfwidth;
  }

  // Symmetric basis index map: alpha = (k, l), k <= l.
  const int B = d * (d + 1) / 2;
  std::vector<std::pair<int, int>> basis;
  basis.reserve(size_t(B));
  for (int k = 0; k < d; ++k) {
    for (int l = k; l < d; ++l) basis.emplace_back(k, l);
  }

  // Per-constraint linear coefficients: v_j[alpha] = g_j^T S_alpha g_j.
  Matrix V(m, B);
  for (int j = 0; j < m; ++j) {
    for (int a = 0; a < B; ++a) {
      const auto [k, l] = basis[size_t(a)];
      V(j, a) = (k == l) ? G(j, k) * G(j, k) : 2.0 * G(j, k) * G(j, l);
    }
  }

  // Strictly feasible start: a ball of radius 0.9 * wmin.
  Matrix Q = Matrix::Identity(d, d) * (0.81 * wmin * wmin);

  auto slacks_of = [&](const Matrix& Qm, Vector& s) {
    for (int j = 0; j < m; ++j) s[j] = 1.0 - G.row(j) * (Qm * G.row(j).transpose());
  };
  auto barrier_value = [&](const Matrix& Qm, double t, double& logdet_out) {
    Eigen::LLT<Matrix> llt(Qm);
    if (llt.info() != Eigen::Success) return -std::numeric_limits<double>::infinity();
    double logdet = 0.0;
    for (int k = 0; k < d; ++k) logdet += 2.0 * std::log(llt.matrixL()(k, k));
    logdet_out = logdet;
    Vector s(m);
    slacks_of(Qm, s);
    if (s.minCoeff() <= 0.0) return -std::numeric_limits<double>::infinity();
    return t * logdet + s.array().log().sum();
  };

  const double t_end = double(m) / std::max(rel_tol * 0.01, 1e-12);
  Vector s(m);
  Matrix P(d, d), T(d, d);
  Vector grad(B), dq(B);
  Matrix H(B, B);

  for (double t = 1.0; ; t *= 20.0) {
    bool centered = false;
    for (int iter = 0; iter < 60; ++iter) {
      slacks_of(Q, s);
      if (s.minCoeff() <= 0.0) throw SolverFailure("barrier left the feasible set");
      P = Q.inverse();
      P = ((P + P.transpose()) / 2.0).eval();

      // gradient over the symmetric basis
      for (int a = 0; a < B; ++a) {
        const auto [k, l] = basis[size_t(a)];
        grad[a] = t * ((k == l) ? P(k, k) : 2.0 * P(k, l));
      }
      for (int j = 0; j < m; ++j) {
        grad -= V.row(j).transpose() / s[j];
      }

      // Hessian: t * tr(P S_a P S_b) + sum_j v_a v_b / s_j^2 (negated form)
      H.setZero();
      for (int a = 0; a < B; ++a) {
        const auto [k, l] = basis[size_t(a)];
        // T = P S_a P
        if (k == l) {
          T = P.col(k) * P.row(k);
        } else {
          T = P.col(k) * P.row(l) + P.col(l) * P.row(k);
        }
        for (int bidx = a; bidx < B; ++bidx) {
          const auto [k2, l2] = basis[size_t(bidx)];
          const double tr = (k2 == l2) ? T(k2, k2) : 2.0 * T(k2, l2);
          H(a, bidx) = t * tr;
        }
      }
      for (int j = 0; j < m; ++j) {
        const double inv2 = 1.0 / (s[j] * s[j]);
        H.selfadjointView<Eigen::Upper>().rankUpdate(V.row(j).transpose(), inv2);
      }
      H = H.selfadjointView<Eigen::Upper>();

      dq = H.ldlt().solve(grad);
      const double decrement = grad.dot(dq);
      if (!(decrement > 0.0)) {
        centered = true;  // numerically stationary
        break;
      }
      if (decrement < 1e-11 * (1.0 + std::abs(t))) {
        centered = true;
        break;
      }

      double logdet = 0.0;
      const double f0 = barrier_value(Q, t, logdet);
      double step = 1.0;
      Matrix Qn(d, d);
      bool moved = false;
      for (int ls = 0; ls < 60; ++ls) {
        Qn = Q;
        for (int a = 0; a < B; ++a) {
          const auto [k, l] = basis[size_t(a)];
          Qn(k, l) += step * dq[a];
          if (k != l) Qn(l, k) += step * dq[a];
        }
        const double f1 = barrier_value(Qn, t, logdet);
        if (f1 > f0 + 0.25 * step * decrement) {
          Q = Qn;
          moved = true;
          break;
        }
        step *= 0.5;
      }
      if (!moved) {
        centered = true;  // line search stalled at the central point
        break;
      }
    }
    if (!centered) throw SolverFailure("inscribed ellipsoid: Newton did not center");
    if (t >= t_end) break;
  }

  Matrix Mout = Q.inverse();
  Mout = ((Mout + Mout.transpose()) / 2.0).eval();
  return Ellipsoid::create(region.center, std::move(Mout));
}

}  // namespace smoothdist

#include "smoothdist/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "smoothdist/errors.hpp"
#include "smoothdist/linprog.hpp"
#include "smoothdist/sampling.hpp"

namespace smoothdist {

Polytope::Polytope(int dim, std::vector<Halfspace> halfspaces,
                   double unit_normal_tol)
    : dim_(dim), hs_(std::move(halfspaces)) {
  if (dim < 1) throw InvalidInput("polytope dimension must be positive");
  if (hs_.empty()) throw InvalidInput("polytope needs at least one halfspace");
  A_.resize(long(hs_.size()), dim);
  b_.resize(long(hs_.size()));
  for (size_t j = 0; j < hs_.size(); ++j) {
    Halfspace& h = hs_[j];
    if (h.a.size() != dim) throw InvalidInput("halfspace normal has wrong dimension");
    const double n = h.a.norm();
    if (!(n > unit_normal_tol) || !std::isfinite(n)) {
      throw InvalidInput("halfspace normal is zero or non-finite");
    }
    if (std::abs(n - 1.0) > unit_normal_tol) {
      h.a /= n;
      h.b /= n;
    }
    if (!std::isfinite(h.b)) throw InvalidInput("halfspace offset is non-finite");
    A_.row(long(j)) = h.a.transpose();
    b_[long(j)] = h.b;
  }
}

double Polytope::slack(int j, const Vector& x) const {
  return b_[j] - A_.row(j).dot(x);
}

double Polytope::min_slack(const Vector& x) const {
  const int n = num_halfspaces();
  const double* bp = b_.data();
  double best = std::numeric_limits<double>::infinity();
  for (int j = 0; j < n; ++j) {
    double dot = 0.0;
    for (int k = 0; k < dim_; ++k) dot += A_(j, k) * x[k];
    best = std::min(best, bp[j] - dot);
  }
  return best;
}

bool Polytope::contains(const Vector& x, double tol) const {
  return min_slack(x) >= -tol;
}

double Polytope::exact_boundary_distance(const Vector& x,
                                         double membership_tol) const {
  const double s = min_slack(x);
  if (s < -membership_tol) throw PointOutside("point lies outside the polytope");
  return std::max(s, 0.0);
}

BoundingBox bounding_box(const Polytope& p) {
  const int d = p.dim();
  BoundingBox box{Vector(d), Vector(d)};
  for (int k = 0; k < d; ++k) {
    Vector c = Vector::Zero(d);
    c[k] = 1.0;
    LpResult up = lp_maximize(c, p.A(), p.b());
    c[k] = -1.0;
    LpResult dn = lp_maximize(c, p.A(), p.b());
    if (up.status == LpStatus::Unbounded || dn.status == LpStatus::Unbounded) {
      throw UnboundedPolytope("halfspace intersection is unbounded");
    }
    if (up.status == LpStatus::Infeasible || dn.status == LpStatus::Infeasible) {
      throw EmptyInterior("halfspace intersection is empty");
    }
    box.hi[k] = up.value;
    box.lo[k] = -dn.value;
  }
  return box;
}

ChebyshevBall chebyshev_ball(const Polytope& p, double interior_tol) {
  // max r  s.t.  a_j.x + r <= b_j.  Boundedness of the polytope keeps the
  // program bounded in r; probe the box first so unboundedness in x is
  // reported as UnboundedPolytope rather than a simplex ray.
  bounding_box(p);
  const int d = p.dim();
  const int n = p.num_halfspaces();
  Matrix A(n, d + 1);
  A.leftCols(d) = p.A();
  A.col(d).setOnes();
  Vector c = Vector::Zero(d + 1);
  c[d] = 1.0;
  LpResult r = lp_maximize(c, A, p.b());
  if (r.status != LpStatus::Optimal || r.value <= interior_tol) {
    throw EmptyInterior("halfspace intersection has empty interior");
  }
  return {r.x.head(d), r.value};
}

std::vector<Vector> enumerate_vertices(const Matrix& A, const Vector& b,
                                       double feas_tol, double dedupe_tol) {
  const int n = int(A.rows());
  const int d = int(A.cols());
  std::vector<Vector> verts;
  if (n < d) return verts;

  std::vector<int> idx(d);
  for (int k = 0; k < d; ++k) idx[k] = k;

  Matrix S(d, d);
  Vector rhs(d);
  while (true) {
    for (int k = 0; k < d; ++k) {
      S.row(k) = A.row(idx[k]);
      rhs[k] = b[idx[k]];
    }
    Eigen::FullPivLU<Matrix> lu(S);
    lu.setThreshold(1e-9);
    if (lu.isInvertible()) {
      Vector v = lu.solve(rhs);
      if ((A * v - b).maxCoeff() <= feas_tol) {
        bool dup = false;
        for (const Vector& w : verts) {
          if ((w - v).lpNorm<Eigen::Infinity>() <= dedupe_tol) {
            dup = true;
            break;
          }
        }
        if (!dup) verts.push_back(std::move(v));
      }
    }
    // next d-combination of {0..n-1}
    int k = d - 1;
    while (k >= 0 && idx[k] == n - d + k) --k;
    if (k < 0) break;
    ++idx[k];
    for (int j = k + 1; j < d; ++j) idx[j] = idx[j - 1] + 1;
  }
  return verts;
}

namespace {

double diameter_from_vertices(const std::vector<Vector>& verts) {
  double best = 0.0;
  for (size_t i = 0; i < verts.size(); ++i) {
    for (size_t j = i + 1; j < verts.size(); ++j) {
      best = std::max(best, (verts[i] - verts[j]).norm());
    }
  }
  return best;
}

double diameter_by_support_sampling(const Polytope& p) {
  const int d = p.dim();
  // Deterministic directions: low-discrepancy points in [0,1]^d mapped to
  // the sphere through the inverse normal CDF would be overkill; offsets
  // from the cube center give adequate direction coverage at this count.
  HaltonSampler sampler(d, 17);
  double best = 0.0;
  for (int i = 0; i < 1000; ++i) {
    Vector u = sampler.next();
    for (int k = 0; k < d; ++k) u[k] -= 0.5;
    const double n = u.norm();
    if (n < 1e-9) continue;
    u /= n;
    LpResult up = lp_maximize(u, p.A(), p.b());
    LpResult dn = lp_maximize(Vector(-u), p.A(), p.b());
    if (up.status != LpStatus::Optimal || dn.status != LpStatus::Optimal) {
      throw UnboundedPolytope("halfspace intersection is unbounded");
    }
    best = std::max(best, up.value + dn.value);
  }
  return best;
}

}  // namespace

double diameter(const Polytope& p, bool* exact) {
  const bool exact_path = p.dim() <= 3 && p.num_halfspaces() <= 128;
  if (exact) *exact = exact_path;
  if (exact_path) {
    std::vector<Vector> verts = enumerate_vertices(p.A(), p.b());
    if (verts.size() < 2) throw EmptyInterior("polytope has no extent");
    return diameter_from_vertices(verts);
  }
  return diameter_by_support_sampling(p);
}

NormalizedPolytope normalize(const Polytope& p) {
  const ChebyshevBall ball = chebyshev_ball(p);
  const double diam = diameter(p);
  if (!(diam > 0.0)) throw EmptyInterior("polytope has zero diameter");

  NormalizationTransform t;
  t.scale = 1.0 / diam;
  t.translation = ball.center;

  std::vector<Halfspace> hs;
  hs.reserve(size_t(p.num_halfspaces()));
  for (const Halfspace& h : p.halfspaces()) {
    // a.x <= b maps to a.y <= scale * (b - a.translation).
    hs.push_back({h.a, t.scale * (h.b - h.a.dot(t.translation))});
  }
  Polytope q(p.dim(), std::move(hs));
  for (const Halfspace& h : q.halfspaces()) {
    if (h.b <= 0.0) throw EmptyInterior("normalized polytope lost its interior");
  }
  return {std::move(q), std::move(t)};
}

double boundary_hit(const Polytope& p, const Vector& x, const Vector& dir) {
  if (!p.contains(x, 1e-12)) throw PointOutside("ray origin outside the polytope");
  const double n = dir.norm();
  if (!(n > 0.0)) throw InvalidInput("ray direction is zero");
  double best = std::numeric_limits<double>::infinity();
  for (int j = 0; j < p.num_halfspaces(); ++j) {
    const double den = p.A().row(j).dot(dir) / n;
    if (den > 1e-15) {
      best = std::min(best, std::max(p.slack(j, x), 0.0) / den);
    }
  }
  if (!std::isfinite(best)) throw InvalidInput("ray never reaches the boundary");
  return best;
}

Polytope polytope_from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("polytope JSON parse failure: ") + e.what());
  }
  if (!j.is_object() || !j.contains("dim") || !j.contains("halfspaces")) {
    throw InvalidInput("polytope JSON needs 'dim' and 'halfspaces'");
  }
  const int dim = j["dim"].get<int>();
  std::vector<Halfspace> hs;
  for (const auto& e : j["halfspaces"]) {
    if (!e.contains("a") || !e.contains("b")) {
      throw InvalidInput("halfspace entry needs 'a' and 'b'");
    }
    const auto& av = e["a"];
    if (!av.is_array() || int(av.size()) != dim) {
      throw InvalidInput("halfspace normal has wrong dimension");
    }
    Halfspace h;
    h.a.resize(dim);
    for (int k = 0; k < dim; ++k) h.a[k] = av[size_t(k)].get<double>();
    h.b = e["b"].get<double>();
    hs.push_back(std::move(h));
  }
  return Polytope(dim, std::move(hs));
}

Polytope load_polytope(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open polytope file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return polytope_from_json_text(ss.str());
}

std::string polytope_to_json_text(const Polytope& p) {
  nlohmann::json j;
  j["dim"] = p.dim();
  nlohmann::json hs = nlohmann::json::array();
  for (const Halfspace& h : p.halfspaces()) {
    nlohmann::json e;
    e["a"] = std::vector<double>(h.a.data(), h.a.data() + h.a.size());
    e["b"] = h.b;
    hs.push_back(std::move(e));
  }
  j["halfspaces"] = std::move(hs);
  return j.dump(2);
}

void save_polytope(const Polytope& p, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write polytope file: " + path);
  out << polytope_to_json_text(p) << "\n";
}

}  // namespace smoothdist

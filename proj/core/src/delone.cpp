#include "smoothdist/delone.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>

#include "smoothdist/errors.hpp"
#include "smoothdist/grid.hpp"
#include "smoothdist/macbeath.hpp"
#include "smoothdist/sampling.hpp"

namespace smoothdist {
namespace {

// Bounding-box reject before the exact membership value.
bool inside_ellipsoid_fast(const Ellipsoid& e, const Vector& p) {
  const int d = int(p.size());
  for (int k = 0; k < d; ++k) {
    if (std::abs(p[k] - e.center()[k]) > e.bbox_halfwidth(k)) return false;
  }
  return e.value(p) <= 1.0;
}

DelonePoint make_center(const LiftedBody& expanded, const Vector& x,
                        double lambda_p, double lambda_c) {
  // One solve at unit scale; the three ellipsoids are exact scalings.
  const Ellipsoid unit = inscribed_ellipsoid(macbeath_region(expanded, x, 1.0));
  DelonePoint p;
  p.x = x;
  p.covering = unit.scaled(lambda_c);
  p.packing = unit.scaled(lambda_p);
  p.half_covering = unit.scaled(lambda_c / 2.0);
  return p;
}

void ellipsoid_box(const Ellipsoid& e, int dim, Vector& blo, Vector& bhi) {
  for (int k = 0; k < dim; ++k) {
    blo[k] = e.center()[k] - e.bbox_halfwidth(k);
    bhi[k] = e.center()[k] + e.bbox_halfwidth(k);
  }
}

// Centers plus incremental spatial indexes over their packing and half
// covering ellipsoids.  The grids' cell layout is fixed up front; boxes
// outside the range clamp into the border cells, which only costs time.
// Copy of v with coordinate `axis` removed.
Vector drop_axis(const Vector& v, int axis) {
  Vector out(v.size() - 1);
  int t = 0;
  for (int k = 0; k < int(v.size()); ++k) {
    if (k != axis) out[t++] = v[k];
  }
  return out;
}

class CenterSet {
 public:
  CenterSet(const Vector& lo, const Vector& hi, double cell, int dim)
      : dim_(dim),
        pack_grid_(lo, hi, cell, std::int64_t(1) << 20),
        half_grid_(lo, hi, cell, std::int64_t(1) << 20),
        blo_(dim),
        bhi_(dim) {
    line_grids_.reserve(size_t(dim));
    for (int axis = 0; axis < dim; ++axis) {
      line_grids_.emplace_back(drop_axis(lo, axis), drop_axis(hi, axis), cell,
                               std::int64_t(1) << 20);
    }
  }

  const std::vector<DelonePoint>& centers() const { return centers_; }
  std::vector<DelonePoint>& centers() { return centers_; }

  // Ids of half covers whose bounding box crosses the axis-parallel line
  // through q (coordinates of q with `axis` dropped).
  const std::vector<int>& line_ids(int axis, const Vector& q) const {
    return line_grids_[size_t(axis)].at(q);
  }

  bool covered(const Vector& p) const {
    for (int id : half_grid_.at(p)) {
      if (inside_ellipsoid_fast(centers_[size_t(id)].half_covering, p)) {
        return true;
      }
    }
    return false;
  }

  bool packing_disjoint(const Ellipsoid& pack, double tol) {
    ellipsoid_box(pack, dim_, blo_, bhi_);
    pack_grid_.collect_box(blo_, bhi_, scratch_);
    for (int id : scratch_) {
      const Ellipsoid& other = centers_[size_t(id)].packing;
      const double dist = (other.center() - pack.center()).norm();
      if (dist > other.rmax() + pack.rmax()) continue;
      if (ellipsoids_intersect(other, pack, tol)) return false;
    }
    return true;
  }

  void insert(DelonePoint&& c) {
    const int id = int(centers_.size());
    ellipsoid_box(c.packing, dim_, blo_, bhi_);
    pack_grid_.insert_box(blo_, bhi_, id);
    ellipsoid_box(c.half_covering, dim_, blo_, bhi_);
    half_grid_.insert_box(blo_, bhi_, id);
    for (int axis = 0; axis < dim_; ++axis) {
      line_grids_[size_t(axis)].insert_box(drop_axis(blo_, axis),
                                           drop_axis(bhi_, axis), id);
    }
    centers_.push_back(std::move(c));
  }

 private:
  int dim_;
  UniformGrid pack_grid_;
  UniformGrid half_grid_;
  std::vector<UniformGrid> line_grids_;
  std::vector<DelonePoint> centers_;
  Vector blo_, bhi_;
  std::vector<int> scratch_;
};

}  // namespace

std::vector<DelonePoint> build_delone_set(const LiftedBody& body,
                                          const LiftedBody& expanded,
                                          double lambda_p, double lambda_c,
                                          std::uint64_t seed,
                                          const RunConfig& cfg) {
  if (!(lambda_p > 0.0) || !(lambda_p < lambda_c) || !(lambda_c < 1.0)) {
    throw NonPositiveLambda("need 0 < lambda_p < lambda_c < 1");
  }
  if (!(expanded.delta() > 0.0)) {
    throw InvalidInput("expanded body must be strictly larger than the body");
  }
  const int D = body.ambient_dim();
  const double delta = expanded.delta();

  // Sample box: base bounding box times the envelope height range.
  const BoundingBox bb = bounding_box(body.base());
  const ChebyshevBall ball = chebyshev_ball(body.base());
  Vector lo(D), hi(D);
  lo.head(D - 1) = bb.lo;
  hi.head(D - 1) = bb.hi;
  lo[D - 1] = 0.0;
  hi[D - 1] = ball.radius;

  const double target_f = double(cfg.samples.worklist_factor) *
                          std::pow(delta, -0.5 * double(D));
  // Coarse levels (delta near 1) would otherwise get a handful of samples
  // and miss thin regions entirely.
  const size_t target =
      std::max<size_t>(64, size_t(std::ceil(std::min(target_f, 4e6))));

  HaltonSampler sampler(D, seed);
  Vector buf(D);
  auto draw_in_body = [&](size_t count, std::vector<Vector>& out) {
    out.clear();
    out.reserve(count);
    size_t attempts = 0;
    const size_t cap = 2000 * count + 10000;
    while (out.size() < count && attempts < cap) {
      sampler.next_in_box_into(lo, hi, buf);
      ++attempts;
      if (buf[D - 1] <= body.envelope(buf.head(D - 1))) out.push_back(buf);
    }
    if (out.size() < count) {
      throw CoverageFailure("sampling the body kept rejecting points");
    }
  };

  std::vector<Vector> work;
  draw_in_body(target, work);
  const double predicate_tol = cfg.tol.predicate;
  const auto t0 = std::chrono::steady_clock::now();
  auto lap = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  };

  // Grid cells at the smallest structure scale: every point of the body has
  // expanded slack at least delta/sqrt(2), so half covers are never thinner
  // than about lambda_c/2 times that.
  const double cell = lambda_c * delta / std::sqrt(2.0);
  CenterSet set(lo, hi, cell, D);

  // Frontier expansion: every accepted center probes its own neighborhood,
  // so contiguous under-covered regions are walked seam by seam instead of
  // waiting for the uniform stream to land in each gap.  Probes sit along
  // the half-cover axes just outside the half cover, plus paired diagonals,
  // clamped back to the body in the vertical coordinate.
  std::vector<Vector> frontier;
  Vector probe(D), pu(D);
  auto push_probes = [&](const DelonePoint& w) {
    const Ellipsoid& h = w.half_covering;
    auto push_u = [&](const Vector& u) {
      probe.noalias() = h.center() + h.ball_map() * u;
      const double env = body.envelope(probe.head(D - 1));
      if (env < 0.0) return;
      probe[D - 1] = std::clamp(probe[D - 1], 0.0, env);
      frontier.push_back(probe);
    };
    const double reach = 1.8;
    for (int k = 0; k < D; ++k) {
      pu.setZero();
      pu[k] = reach;
      push_u(pu);
      pu[k] = -reach;
      push_u(pu);
    }
    // Diagonal ring: all sign patterns at the same reach, the deep-hole
    // directions of the axis ring.
    const double comp = reach / std::sqrt(double(D));
    for (unsigned mask = 0; mask < (1u << D); ++mask) {
      for (int k = 0; k < D; ++k) {
        pu[k] = (mask >> k) & 1u ? comp : -comp;
      }
      push_u(pu);
    }
  };
  size_t n_packreject = 0, n_flood = 0, n_seed = 0;
  auto try_insert = [&](const Vector& p) {
    if (set.covered(p)) return false;
    DelonePoint cand = make_center(expanded, p, lambda_p, lambda_c);
    // A packing-rejected candidate is already claimed: an intersecting
    // packing implies its owner's half cover contains the point.
    if (!set.packing_disjoint(cand.packing, predicate_tol)) {
      ++n_packreject;
      return false;
    }
    push_probes(cand);
    set.insert(std::move(cand));
    return true;
  };
  auto drain_frontier = [&]() {
    while (!frontier.empty()) {
      const Vector p = std::move(frontier.back());
      frontier.pop_back();
      if (try_insert(p)) ++n_flood;
    }
  };

  for (const Vector& p : work) {
    if (try_insert(p)) drain_frontier();
  }
  fprintf(stderr, "[d] delta %.4f worklist done: %zu centers %.2fs\n", delta,
          set.centers().size(), lap());

  // Axis-line certification: along every line of a lattice parallel to each
  // coordinate axis, the fiber of the body must be covered by the half-cover
  // intervals, which is an exact 1D check.  A gap gets a witness at its
  // midpoint, the frontier expands around it, and the line is rescanned.
  // Sweeping all axes matters: residual pockets are thin along roughly one
  // direction and wide across the rest, so the sweep nearest their thin
  // direction meets them broadside at lattice resolution.
  {
    const int bd = D - 1;
    const double hb = 0.5 * cell;
    const Matrix& A = body.base().A();
    const Vector& b = body.base().b();
    const int m = int(b.size());
    std::vector<std::pair<double, double>> ivals;
    Vector q(D), sliced(D - 1), diff(D), mdiff(D);
    std::vector<int> counts(D - 1), idx(D - 1, 0);
    for (int axis = 0; axis < D; ++axis) {
      int t = 0;
      for (int k = 0; k < D; ++k) {
        if (k != axis) {
          counts[t] = std::max(1, int(std::ceil((hi[k] - lo[k]) / hb)));
          ++t;
        }
      }
      std::fill(idx.begin(), idx.end(), 0);
      for (bool more = true; more;) {
        {
          int u = 0;
          for (int k = 0; k < D; ++k) {
            if (k == axis) {
              q[k] = 0.0;
            } else {
              q[k] = lo[k] + (double(idx[u]) + 0.5) * hb;
              sliced[u] = q[k];
              ++u;
            }
          }
        }
        // Fiber of the body along the line: clip every lifted constraint
        // a_j . x + z <= b_j (plus the ground) to a parameter interval.
        double t0 = lo[axis], t1 = hi[axis];
        if (axis == bd) t0 = 0.0;
        for (int j = 0; j < m && t1 > t0; ++j) {
          double base = q[bd];
          for (int k = 0; k < bd; ++k) base += A(j, k) * q[k];
          const double coef = axis == bd ? 1.0 : A(j, axis);
          if (coef > 1e-14) {
            t1 = std::min(t1, (b[j] - base) / coef);
          } else if (coef < -1e-14) {
            t0 = std::max(t0, (b[j] - base) / coef);
          } else if (base > b[j]) {
            t1 = t0;
          }
        }
        if (t1 > t0 + 1e-12) {
          for (int redo = 0;; ++redo) {
            if (redo > 200) {
              throw CoverageFailure(
                  "an axis line kept exposing coverage gaps (delta " +
                  std::to_string(delta) + ")");
            }
            ivals.clear();
            for (int id : set.line_ids(axis, sliced)) {
              // Quadratic along the line for this half cover.
              const Ellipsoid& e = set.centers()[size_t(id)].half_covering;
              diff = q - e.center();
              diff[axis] = 0.0;
              mdiff.noalias() = e.M() * diff;
              const double qa = e.M()(axis, axis);
              const double qb = mdiff[axis];
              const double qc = diff.dot(mdiff) - 1.0;
              const double disc = qb * qb - qa * qc;
              if (disc <= 0.0) continue;
              const double root = std::sqrt(disc);
              ivals.emplace_back((-qb - root) / qa + e.center()[axis],
                                 (-qb + root) / qa + e.center()[axis]);
            }
            std::sort(ivals.begin(), ivals.end());
            double cur = t0, gap_lo = t0 - 1.0, gap_hi = t0 - 1.0;
            bool found = false;
            for (const auto& iv : ivals) {
              if (iv.first > cur + 1e-9) {
                gap_lo = cur;
                gap_hi = iv.first;
                found = true;
                break;
              }
              cur = std::max(cur, iv.second);
              if (cur >= t1) break;
            }
            if (!found && cur < t1 - 1e-9) {
              gap_lo = cur;
              gap_hi = t1;
              found = true;
            }
            if (!found) break;
            q[axis] = std::min(0.5 * (gap_lo + gap_hi), t1);
            if (!try_insert(q)) break;  // tolerance-level sliver
            drain_frontier();
          }
        }
        more = false;
        for (int k = 0; k < D - 1; ++k) {
          if (++idx[k] < counts[k]) {
            more = true;
            break;
          }
          idx[k] = 0;
        }
      }
    }
  }
  fprintf(stderr, "[d] delta %.4f line sweep done: %zu centers %.2fs\n", delta,
          set.centers().size(), lap());

  // Certification on the fresh remainder of the stream: insert a witness at
  // every uncovered point (expanding around it as above), and accept once a
  // long run of consecutive points comes back covered.
  const double verify_f = double(cfg.samples.coverage_verify_factor) *
                          std::pow(delta, -0.5 * double(D));
  const size_t verify_n =
      std::max<size_t>(256, size_t(std::ceil(std::min(verify_f, 4e6))));
  const size_t streak_target = std::max<size_t>(2 * verify_n, 50'000);
  const size_t budget = 64 * verify_n + 40 * streak_target;

  auto draw_one = [&](Vector& q) {
    for (int att = 0; att < 200000; ++att) {
      sampler.next_in_box_into(lo, hi, q);
      if (q[D - 1] <= body.envelope(q.head(D - 1))) return;
    }
    throw CoverageFailure("sampling the body kept rejecting points");
  };

  Vector q(D);
  size_t streak = 0;
  for (size_t seen = 0; streak < streak_target; ++seen) {
    if (seen >= budget) {
      throw CoverageFailure(
          "coverage holes persisted through witness insertion (delta " +
          std::to_string(delta) + ")");
    }
    if (seen % 200000 == 0 && seen > 0) {
      fprintf(stderr,
              "[d]   seen %zu streak %zu centers %zu seed %zu flood %zu "
              "packrej %zu\n",
              seen, streak, set.centers().size(), n_seed, n_flood,
              n_packreject);
    }
    draw_one(q);
    if (try_insert(q)) {
      ++n_seed;
      drain_frontier();
      streak = 0;
    } else {
      // Covered, or covered within predicate tolerance by a center whose
      // packing the witness would overlap.
      ++streak;
    }
  }
  if (set.centers().empty()) throw CoverageFailure("no centers selected");
  fprintf(stderr, "[d] delta %.4f stream done: %zu centers %.2fs\n", delta,
          set.centers().size(), lap());
  return std::move(set.centers());
}

}  // namespace smoothdist

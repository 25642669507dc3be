#include "smoothdist/dag.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cmath>
#include <limits>
#include <string>

#include "smoothdist/delone.hpp"
#include "smoothdist/errors.hpp"
#include "smoothdist/grid.hpp"
#include "smoothdist/lifted_body.hpp"
#include "smoothdist/sampling.hpp"

namespace smoothdist {
extern size_t g_isect_calls, g_isect_ball, g_isect_cval, g_isect_sup,
    g_isect_grad, g_isect_newton;
namespace {

constexpr int kMaxLevels = 48;

// Seed streams derived from the run seed.  Levels use offsets 0..47.
constexpr std::uint64_t kTopSeedOffset = 48;
constexpr std::uint64_t kRepSeedOffset = 50;

DagLevel make_level(std::vector<DelonePoint> pts, double delta) {
  DagLevel level;
  level.delta = delta;
  level.nodes.reserve(pts.size());
  for (DelonePoint& p : pts) {
    DagNode n;
    n.center = std::move(p.x);
    n.covering = std::move(p.covering);
    n.packing = std::move(p.packing);
    n.half_covering = std::move(p.half_covering);
    level.nodes.push_back(std::move(n));
  }
  return level;
}

// One level's covering ellipsoids copied into flat arrays.  Linking touches
// every near pair of two levels, and the per-node Eigen storage scatters
// that traffic across the heap; the packed copy streams instead.
struct PackedCovers {
  int n = 0;
  int D = 0;
  std::vector<double> c, M, L, rmn, rmx, bb;

  void load(const DagLevel& lv) {
    n = int(lv.nodes.size());
    D = int(lv.nodes[0].center.size());
    const size_t d = size_t(D), dd = d * d;
    c.resize(size_t(n) * d);
    M.resize(size_t(n) * dd);
    L.resize(size_t(n) * dd);
    rmn.resize(size_t(n));
    rmx.resize(size_t(n));
    bb.resize(size_t(n) * d);
    for (int i = 0; i < n; ++i) {
      const Ellipsoid& e = lv.nodes[size_t(i)].covering;
      Eigen::Map<Vector>(c.data() + size_t(i) * d, D) = e.center();
      Eigen::Map<Matrix>(M.data() + size_t(i) * dd, D, D) = e.M();
      Eigen::Map<Matrix>(L.data() + size_t(i) * dd, D, D) = e.ball_map();
      rmn[size_t(i)] = e.rmin();
      rmx[size_t(i)] = e.rmax();
      for (int k = 0; k < D; ++k) {
        bb[size_t(i) * d + k] = e.bbox_halfwidth(k);
      }
    }
  }

  EllipsoidRef ref(int i) const {
    const size_t d = size_t(D), dd = d * d;
    return EllipsoidRef(c.data() + size_t(i) * d, M.data() + size_t(i) * dd,
                        L.data() + size_t(i) * dd, D, rmn[size_t(i)],
                        rmx[size_t(i)]);
  }

  double dist2(int i, const double* q) const {
    const double* a = c.data() + size_t(i) * size_t(D);
    double acc = 0.0;
    for (int k = 0; k < D; ++k) {
      const double t = a[k] - q[k];
      acc += t * t;
    }
    return acc;
  }
};

void link_levels(DagLevel& parents, const DagLevel& children, double tol,
                 int* max_out_degree) {
  const int D = int(children.nodes[0].center.size());
  PackedCovers P, C;
  P.load(parents);
  C.load(children);

  // Interior nodes span a body-scale covering while boundary nodes sit at
  // the resolution scale.  Cells sized to the mix make every query collect
  // half the level, so the wide nodes are split off into a list the distance
  // prefilter scans directly, and the grid holds only the rest.
  std::vector<int> narrow, wide;
  {
    std::vector<double> tmp(P.rmx);
    std::nth_element(tmp.begin(), tmp.begin() + P.n / 2, tmp.end());
    const double cut = 3.0 * tmp[size_t(P.n / 2)];
    for (int i = 0; i < P.n; ++i) {
      (P.rmx[size_t(i)] > cut ? wide : narrow).push_back(i);
    }
    if (P.n <= 256 || narrow.empty()) {
      wide.clear();
      narrow.clear();
      for (int i = 0; i < P.n; ++i) wide.push_back(i);
    }
  }

  Vector glo = Vector::Constant(D, std::numeric_limits<double>::infinity());
  Vector ghi = -glo;
  double mean_hw = 1.0;
  for (int i : narrow) {
    for (int k = 0; k < D; ++k) {
      const double cc = P.c[size_t(i) * size_t(D) + k];
      const double hw = P.bb[size_t(i) * size_t(D) + k];
      glo[k] = std::min(glo[k], cc - hw);
      ghi[k] = std::max(ghi[k], cc + hw);
      mean_hw += hw;
    }
  }
  if (!narrow.empty()) {
    mean_hw = (mean_hw - 1.0) / double(narrow.size() * size_t(D));
  }
  UniformGrid grid(narrow.empty() ? Vector::Zero(D) : glo,
                   narrow.empty() ? Vector::Ones(D) : ghi, 2.0 * mean_hw,
                   std::int64_t(1) << 20);
  {
    Vector blo(D), bhi(D);
    for (size_t s = 0; s < narrow.size(); ++s) {
      const int i = narrow[s];
      for (int k = 0; k < D; ++k) {
        const double cc = P.c[size_t(i) * size_t(D) + k];
        const double hw = P.bb[size_t(i) * size_t(D) + k];
        blo[k] = cc - hw;
        bhi[k] = cc + hw;
      }
      grid.insert_box(blo, bhi, int(s));
    }
  }

  // Visiting the children by spatial bucket keeps each bucket's parent rows
  // hot; insertion order hops across the body and reloads them every time.
  std::vector<int> corder(size_t(C.n));
  {
    const double qcell = 2.0 * mean_hw;
    std::vector<std::pair<std::uint64_t, int>> keyed(size_t(C.n));
    for (int ci = 0; ci < C.n; ++ci) {
      const double* cc = C.c.data() + size_t(ci) * size_t(D);
      std::uint64_t key = 0;
      for (int k = 0; k < D; ++k) {
        const double t = std::clamp((cc[k] - glo[k]) / qcell, 0.0, 4094.0);
        key = key << 12 | std::uint64_t(t);
      }
      keyed[size_t(ci)] = {key, ci};
    }
    std::sort(keyed.begin(), keyed.end());
    for (int i = 0; i < C.n; ++i) corder[size_t(i)] = keyed[size_t(i)].second;
  }

  for (DagNode& p : parents.nodes) p.children.clear();
  std::vector<int> candidates;
  Vector blo(D), bhi(D);
  for (int ci : corder) {
    const double* cc = C.c.data() + size_t(ci) * size_t(D);
    const double* cbb = C.bb.data() + size_t(ci) * size_t(D);
    const double crmx = C.rmx[size_t(ci)];
    auto test = [&](int pi) {
      const double r = P.rmx[size_t(pi)] + crmx;
      if (P.dist2(pi, cc) > r * r) return;
      // Per-axis box overlap cuts the flat-on-flat pairs the radius test
      // cannot: stacked coverings are thin vertically and wide across.
      const double* pc = P.c.data() + size_t(pi) * size_t(D);
      const double* pbb = P.bb.data() + size_t(pi) * size_t(D);
      for (int k = 0; k < D; ++k) {
        if (std::abs(pc[k] - cc[k]) > pbb[k] + cbb[k]) return;
      }
      if (ellipsoids_intersect(P.ref(pi), C.ref(ci), tol)) {
        parents.nodes[size_t(pi)].children.push_back(ci);
      }
    };
    for (int pi : wide) test(pi);
    if (!narrow.empty()) {
      for (int k = 0; k < D; ++k) {
        const double hw = C.bb[size_t(ci) * size_t(D) + k];
        blo[k] = cc[k] - hw;
        bhi[k] = cc[k] + hw;
      }
      grid.collect_box(blo, bhi, candidates);
      for (int s : candidates) test(narrow[size_t(s)]);
    }
  }
  for (DagNode& p : parents.nodes) {
    if (p.children.empty()) {
      throw CoverageFailure("a non-leaf node has no overlapping child");
    }
    std::sort(p.children.begin(), p.children.end());
    *max_out_degree = std::max(*max_out_degree, int(p.children.size()));
  }
}

int argmin_slack(const Polytope& p, const Vector& x) {
  int best = 0;
  double best_v = p.slack(0, x);
  for (int j = 1; j < p.num_halfspaces(); ++j) {
    const double v = p.slack(j, x);
    if (v < best_v) {
      best_v = v;
      best = j;
    }
  }
  return best;
}

}  // namespace

DistanceDag build_dag(const Polytope& p, const RunConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  if (!(cfg.epsilon > 0.0) || !(cfg.epsilon < 0.5)) {
    throw InvalidInput("epsilon must lie in (0, 1/2)");
  }
  NormalizedPolytope norm = normalize(p);
  const int d = norm.polytope.dim();
  const double lc = cfg.resolved_lambda_c(d);
  const double lp = cfg.resolved_lambda_p(d);

  DistanceDag dag(p, norm.polytope, norm.transform);
  dag.epsilon = cfg.epsilon;
  dag.seed = cfg.seed;
  dag.lambda_c = lc;
  dag.lambda_p = lp;
  dag.config = cfg;

  const LiftedBody body = lift(norm.polytope);

  double delta = cfg.epsilon;
  for (int l = 0; l < kMaxLevels; ++l) {
    const LiftedBody expanded = expand(body, delta);
    std::vector<DelonePoint> pts = build_delone_set(
        body, expanded, lp, lc, cfg.seed * 64 + std::uint64_t(l), cfg);
    dag.levels.push_back(make_level(std::move(pts), delta));
    dag.stats.level_sizes.push_back(int(dag.levels.back().nodes.size()));
    if (dag.levels.back().nodes.size() == 1) break;
    delta *= 2.0;
  }
  if (dag.levels.back().nodes.size() != 1) {
    throw CoverageFailure("net sizes did not collapse to a single root");
  }
  auto lap = [&]{ return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };
  fprintf(stderr, "[t] levels %.2f\n", lap());

  for (size_t l = 1; l < dag.levels.size(); ++l) {
    link_levels(dag.levels[l], dag.levels[l - 1], cfg.tol.predicate,
                &dag.stats.max_out_degree);
  }

  fprintf(stderr,
          "[t] linked %.2f calls %zu ball %zu cval %zu sup %zu grad %zu\n",
          lap(), g_isect_calls, g_isect_ball, g_isect_cval, g_isect_sup,
          g_isect_grad);
  std::vector<DagNode>& leaves = dag.levels[0].nodes;
  for (DagNode& n : leaves) {
    n.rep_index = argmin_slack(norm.polytope, n.center.head(d));
  }

  std::vector<Ellipsoid> shadows;
  shadows.reserve(leaves.size());
  for (const DagNode& n : leaves) {
    shadows.push_back(n.covering.project_vertical());
  }

  fprintf(stderr, "[t] shadows %.2f\n", lap());
  // Patch sites are the leaves that crest the upper boundary.  Candidates
  // are the leaves whose covering reaches some facet plane a_j.x + z = b_j
  // (the winner on any vertical line reaches, so no winner is missed).  A
  // candidate is kept when its covering tops the vertical line through its
  // own base center; that prunes the stacks of reaching ellipsoids lying
  // under the true crest, which otherwise multiply every overlap list.
  // Finally, sampled base points with no site shadow at quarter level pull
  // in the best remaining candidate there, so the site half shadows still
  // cover the base the way the full leaf set does.
  {
    const int m = norm.polytope.num_halfspaces();
    Vector w(d + 1);
    std::vector<int> reached;
    for (size_t li = 0; li < leaves.size(); ++li) {
      const Ellipsoid& e = leaves[li].covering;
      bool reaches = false;
      for (int j = 0; j < m && !reaches; ++j) {
        w.head(d) = norm.polytope.A().row(j).transpose();
        w[d] = 1.0;
        const double reach =
            w.dot(e.center()) + (e.ball_map().transpose() * w).norm();
        reaches = reach >= norm.polytope.b()[j] - cfg.tol.predicate;
      }
      leaves[li].is_top = false;
      if (reaches) reached.push_back(int(li));
    }

    std::vector<const Ellipsoid*> items;
    items.reserve(reached.size());
    for (int li : reached) items.push_back(&shadows[size_t(li)]);
    UniformGrid crest_grid = ellipsoid_bbox_grid(items, d);

    // Highest covering on the vertical line through x, by candidate order.
    auto line_winner = [&](const Vector& x) {
      int best = -1;
      double best_z = -std::numeric_limits<double>::infinity();
      for (int ri : crest_grid.at(x)) {
        const int li = reached[size_t(ri)];
        const auto hit = leaves[size_t(li)].covering.vertical_line_hit(x);
        if (hit && hit->second > best_z + cfg.tol.predicate) {
          best_z = hit->second;
          best = li;
        }
      }
      return best;
    };

    for (int li : reached) {
      const int win = line_winner(leaves[size_t(li)].center.head(d));
      if (win >= 0) leaves[size_t(win)].is_top = true;
    }

    // Coverage repair: wherever no site shadow is inside the quarter level,
    // promote the reaching leaf with the deepest shadow there.
    {
      HaltonSampler sampler(d, cfg.seed * 64 + kTopSeedOffset);
      const double pf = double(cfg.samples.top_factor) *
                        std::pow(cfg.epsilon, -0.5 * double(d + 1));
      const size_t passes =
          std::max<size_t>(8192, size_t(std::ceil(std::min(pf, 1e6))));
      const BoundingBox bb = bounding_box(norm.polytope);
      Vector x(d);
      size_t att = 0;
      for (size_t it = 0; it < passes && att < 400 * passes; ++att) {
        sampler.next_in_box_into(bb.lo, bb.hi, x);
        if (!norm.polytope.contains(x, 0.0)) continue;
        ++it;
        int best = -1;
        double best_f = std::numeric_limits<double>::infinity();
        bool covered = false;
        for (int ri : crest_grid.at(x)) {
          const int li = reached[size_t(ri)];
          const double f = shadows[size_t(li)].value(x);
          if (leaves[size_t(li)].is_top && f <= 0.22) {
            covered = true;
            break;
          }
          if (f < best_f) {
            best_f = f;
            best = li;
          }
        }
        if (!covered && best >= 0 && best_f <= 0.25) {
          leaves[size_t(best)].is_top = true;
        }
      }
    }
  }

  fprintf(stderr, "[t] tops %.2f\n", lap());
  for (size_t i = 0; i < leaves.size(); ++i) {
    if (!leaves[i].is_top) continue;
    leaves[i].patch_id = int(dag.patches.size());
    Patch patch;
    patch.node = int(i);
    patch.projected = shadows[i];
    patch.rep_index = leaves[i].rep_index;
    dag.patches.push_back(std::move(patch));
  }
  dag.stats.num_patches = int(dag.patches.size());

  // Adjacency: which patch shadows can overlap each site's shadow.  Only
  // boundary sites are recorded; descent always lands on one, because the
  // winning leaf on a vertical line reaches the boundary itself.  Interior
  // leaves have shadows a body-scale wide, and listing every patch under
  // them would swamp both the build and the serialized structure.
  {
    std::vector<const Ellipsoid*> items;
    items.reserve(dag.patches.size());
    for (const Patch& patch : dag.patches) items.push_back(&patch.projected);
    UniformGrid patch_grid = ellipsoid_bbox_grid(items, d);
    std::vector<int> candidates;
    Vector blo(d), bhi(d);
    for (size_t i = 0; i < leaves.size(); ++i) {
      if (!leaves[i].is_top) continue;
      const Ellipsoid& s = shadows[i];
      for (int a = 0; a < d; ++a) {
        blo[a] = s.center()[a] - s.bbox_halfwidth(a);
        bhi[a] = s.center()[a] + s.bbox_halfwidth(a);
      }
      patch_grid.collect_box(blo, bhi, candidates);
      for (int k : candidates) {
        const Ellipsoid& e = dag.patches[size_t(k)].projected;
        const double dist = (s.center() - e.center()).norm();
        if (dist > s.rmax() + e.rmax()) continue;
        if (ellipsoids_intersect(s, e, cfg.tol.predicate)) {
          leaves[i].adjacent_patches.push_back(k);
        }
      }
    }
  }

  fprintf(stderr, "[t] patches %.2f\n", lap());
  // Facet accuracy check on every patch: over the patch's shadow clipped to
  // the body, the owning facet's slack may exceed the true distance by at
  // most epsilon (unit diameter frame).
  {
    HaltonSampler sampler(d, cfg.seed * 64 + kRepSeedOffset);
    const size_t per_patch = size_t(cfg.samples.rep_validation_factor)
                             << std::min(d, 20);
    const double bound = cfg.epsilon + cfg.tol.geometric;
    for (const Patch& patch : dag.patches) {
      const Ellipsoid& e = patch.projected;
      size_t kept = 0, attempts = 0;
      while (kept < per_patch && attempts < 100 * per_patch) {
        ++attempts;
        Vector u = sampler.next();
        for (int a = 0; a < d; ++a) u[a] = 2.0 * u[a] - 1.0;
        if (u.norm() > 1.0) continue;
        const Vector x = e.center() + e.ball_map() * u;
        if (!norm.polytope.contains(x, 0.0)) continue;
        ++kept;
        const double v = norm.polytope.slack(patch.rep_index, x);
        const double dist = norm.polytope.min_slack(x);
        if (v - dist > bound) {
          throw RepresentativeValidationFailure(
              "facet slack exceeds distance by more than epsilon on patch " +
              std::to_string(patch.node));
        }
      }
    }
  }

  dag.stats.build_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return dag;
}

int ray_shoot_descend(const DistanceDag& dag, const Vector& x) {
  if (dag.levels.empty()) throw InvalidInput("empty structure");
  const DagNode* cur = &dag.levels.back().nodes[0];
  if (!cur->covering.vertical_line_hit(x)) {
    throw OutsidePolytope("vertical line misses the root covering");
  }
  int cur_idx = 0;
  for (size_t l = dag.levels.size(); l-- > 1;) {
    const std::vector<DagNode>& below = dag.levels[l - 1].nodes;
    double best = -std::numeric_limits<double>::infinity();
    int best_idx = -1;
    for (int ci : cur->children) {
      const auto hit = below[size_t(ci)].covering.vertical_line_hit(x);
      if (hit && hit->second > best) {
        best = hit->second;
        best_idx = ci;
      }
    }
    if (best_idx < 0) {
      throw OutsidePolytope("vertical line escapes every child covering");
    }
    cur = &below[size_t(best_idx)];
    cur_idx = best_idx;
  }
  return cur_idx;
}

std::vector<int> patches_at(const DistanceDag& dag, const Vector& x) {
  const int leaf = ray_shoot_descend(dag, x);
  std::vector<int> out;
  for (int pid : dag.levels[0].nodes[size_t(leaf)].adjacent_patches) {
    if (dag.patches[size_t(pid)].projected.value(x) < 1.0) out.push_back(pid);
  }
  if (out.empty()) {
    // Descent normally ends on a boundary site, whose adjacency lists every
    // patch shadow it can meet.  If it grazes an unlisted leaf, fall back to
    // the full patch sweep before declaring the point outside.
    for (size_t pid = 0; pid < dag.patches.size(); ++pid) {
      if (dag.patches[pid].projected.value(x) < 1.0) out.push_back(int(pid));
    }
  }
  if (out.empty()) {
    throw OutsidePolytope("no patch shadow contains the query point");
  }
  return out;
}

}  // namespace smoothdist

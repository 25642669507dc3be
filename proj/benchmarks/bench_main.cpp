#include <benchmark/benchmark.h>

#include <cmath>
#include <utility>
#include <vector>

#include "smoothdist/blend.hpp"
#include "smoothdist/dag.hpp"
#include "smoothdist/ellipsoid.hpp"
#include "smoothdist/polytope.hpp"
#include "smoothdist/sampling.hpp"

namespace {

using namespace smoothdist;

Polytope octagon() {
  std::vector<Halfspace> hs;
  HaltonSampler sampler(1, 3);
  for (int i = 0; i < 8; ++i) {
    const double angle = 2.0 * 3.14159265358979323846 * double(i) / 8.0;
    Halfspace h;
    h.a = Vector(2);
    h.a << std::cos(angle), std::sin(angle);
    h.b = 1.0 + 0.2 * sampler.next()[0];
    hs.push_back(std::move(h));
  }
  return Polytope(2, std::move(hs));
}

const DistanceDag& dag_eps(double epsilon) {
  static std::vector<std::pair<double, DistanceDag>> cache;
  for (const auto& entry : cache) {
    if (entry.first == epsilon) return entry.second;
  }
  RunConfig cfg;
  cfg.epsilon = epsilon;
  cache.emplace_back(epsilon, build_dag(octagon(), cfg));
  return cache.back().second;
}

std::vector<Vector> interior_points(const DistanceDag& dag, int count) {
  const BoundingBox bb = bounding_box(dag.normalized);
  HaltonSampler sampler(dag.base_dim(), 11);
  std::vector<Vector> pts;
  while (int(pts.size()) < count) {
    Vector x = sampler.next_in_box(bb.lo, bb.hi);
    if (dag.normalized.contains(x, 0.0)) pts.push_back(std::move(x));
  }
  return pts;
}

void BM_BlendValue(benchmark::State& state) {
  const DistanceDag& dag = dag_eps(1.0 / double(state.range(0)));
  const auto pts = interior_points(dag, 512);
  size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(blend_value(dag, pts[i++ & 511]));
  }
}
BENCHMARK(BM_BlendValue)->Arg(5)->Arg(10)->Arg(20);

void BM_BlendGradient(benchmark::State& state) {
  const DistanceDag& dag = dag_eps(1.0 / double(state.range(0)));
  const auto pts = interior_points(dag, 512);
  size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(blend_gradient(dag, pts[i++ & 511]));
  }
}
BENCHMARK(BM_BlendGradient)->Arg(5)->Arg(10)->Arg(20);

void BM_Descend(benchmark::State& state) {
  const DistanceDag& dag = dag_eps(1.0 / double(state.range(0)));
  const auto pts = interior_points(dag, 512);
  size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(ray_shoot_descend(dag, pts[i++ & 511]));
  }
}
BENCHMARK(BM_Descend)->Arg(5)->Arg(10)->Arg(20);

void BM_EllipsoidIntersect(benchmark::State& state) {
  const DistanceDag& dag = dag_eps(10);
  const auto& nodes = dag.levels[0].nodes;
  size_t i = 0;
  const size_t n = nodes.size();
  for (auto _ : state) {
    const Ellipsoid& a = nodes[i % n].covering;
    const Ellipsoid& b = nodes[(i * 7 + 3) % n].covering;
    benchmark::DoNotOptimize(ellipsoids_intersect(a, b));
    ++i;
  }
}
BENCHMARK(BM_EllipsoidIntersect);

void BM_Build(benchmark::State& state) {
  const Polytope p = octagon();
  RunConfig cfg;
  cfg.epsilon = 0.25;
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_dag(p, cfg));
  }
}
BENCHMARK(BM_Build)->Unit(benchmark::kMillisecond);

}  // namespace

int main(int argc, char** argv) {
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  return 0;
}

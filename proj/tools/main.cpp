// Command line front end: build, query, sample on a grid, verify, bench,
// and a few guided demos over small built-in shapes.

#include <cctype>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "smoothdist/blend.hpp"
#include "smoothdist/dag.hpp"
#include "smoothdist/dag_io.hpp"
#include "smoothdist/errors.hpp"
#include "smoothdist/polytope.hpp"
#include "smoothdist/sampling.hpp"
#include "smoothdist/verify.hpp"
#include "smoothdist/witness.hpp"

namespace {

using namespace smoothdist;

// Exit codes: 0 success, 1 verification failure, 2 bad input or usage,
// 3 construction failure, 4 point outside the body.
constexpr int kOk = 0;
constexpr int kVerifyFailed = 1;
constexpr int kBadInput = 2;
constexpr int kBuildFailed = 3;
constexpr int kOutside = 4;

Vector parse_point(const std::string& text, int dim) {
  std::vector<double> values;
  std::string token;
  for (char ch : text + ",") {
    if (ch == ',') {
      if (token.empty()) throw InvalidInput("empty coordinate in point");
      size_t used = 0;
      values.push_back(std::stod(token, &used));
      if (used != token.size()) throw InvalidInput("bad coordinate: " + token);
      token.clear();
    } else if (!std::isspace(static_cast<unsigned char>(ch))) {
      token.push_back(ch);
    }
  }
  if (int(values.size()) != dim) {
    throw InvalidInput("expected " + std::to_string(dim) + " coordinates");
  }
  Vector x(dim);
  for (int i = 0; i < dim; ++i) x[i] = values[size_t(i)];
  return x;
}

std::uint64_t effective_seed(std::uint64_t cli_seed) {
  if (const char* env = std::getenv("SMOOTHDIST_SEED")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end && *end == '\0') return v;
    throw InvalidInput("SMOOTHDIST_SEED is not an unsigned integer");
  }
  return cli_seed;
}

void print_build_summary(const DistanceDag& dag) {
  std::printf("levels %d nodes %zu patches %d epsilon %.17g seed %llu\n",
              dag.depth(), dag.node_count(), int(dag.patches.size()),
              dag.epsilon, static_cast<unsigned long long>(dag.seed));
  std::printf("level sizes:");
  for (int s : dag.stats.level_sizes) std::printf(" %d", s);
  std::printf("\nbuild seconds %.3f max fan-out %d\n",
              dag.stats.build_seconds, dag.stats.max_out_degree);
}

int cmd_build(const std::string& input, const std::string& output,
              double epsilon, std::uint64_t seed, double lambda_c,
              double lambda_p) {
  RunConfig cfg;
  cfg.epsilon = epsilon;
  cfg.seed = effective_seed(seed);
  cfg.lambda_c = lambda_c;
  cfg.lambda_p = lambda_p;
  const Polytope p = load_polytope(input);
  const DistanceDag dag = build_dag(p, cfg);
  save_dag(dag, output);
  print_build_summary(dag);
  std::printf("wrote %s\n", output.c_str());
  return kOk;
}

int cmd_query(const std::string& structure, const std::string& point,
              bool want_gradient, bool want_hessian) {
  const DistanceDag dag = load_dag(structure);
  const Vector x = parse_point(point, dag.base_dim());
  if (!dag.original.contains(x, dag.config.tol.membership)) {
    throw OutsidePolytope("query point is outside the body");
  }
  std::printf("value %.17g\n", blend_value_original(dag, x));
  if (want_gradient) {
    const Vector g = blend_gradient_original(dag, x);
    std::printf("gradient");
    for (int i = 0; i < g.size(); ++i) std::printf(" %.17g", g[i]);
    std::printf("\n");
  }
  if (want_hessian) {
    const Matrix H = blend_hessian_original(dag, x);
    for (int r = 0; r < H.rows(); ++r) {
      std::printf("hessian");
      for (int c = 0; c < H.cols(); ++c) std::printf(" %.17g", H(r, c));
      std::printf("\n");
    }
  }
  return kOk;
}

int cmd_grid(const std::string& structure, const std::string& output,
             int cells) {
  if (cells < 1) throw InvalidInput("cells must be positive");
  const DistanceDag dag = load_dag(structure);
  const int d = dag.base_dim();
  const BoundingBox bb = bounding_box(dag.original);

  std::FILE* out = std::fopen(output.c_str(), "w");
  if (!out) throw InvalidInput("cannot open for writing: " + output);
  std::fprintf(out, "# config epsilon=%.17g seed=%llu dim=%d cells=%d\n",
               dag.epsilon, static_cast<unsigned long long>(dag.seed), d,
               cells);
  for (int i = 0; i < d; ++i) std::fprintf(out, "x%d,", i);
  std::fprintf(out, "inside,value\n");

  std::vector<int> idx(size_t(d), 0);
  Vector x(d);
  for (;;) {
    for (int i = 0; i < d; ++i) {
      const double t = (double(idx[size_t(i)]) + 0.5) / double(cells);
      x[i] = bb.lo[i] + t * (bb.hi[i] - bb.lo[i]);
    }
    const bool inside = dag.original.contains(x, 0.0);
    for (int i = 0; i < d; ++i) std::fprintf(out, "%.17g,", x[i]);
    if (inside) {
      std::fprintf(out, "1,%.17g\n", blend_value_original(dag, x));
    } else {
      std::fprintf(out, "0,nan\n");
    }
    int k = 0;
    while (k < d) {
      if (++idx[size_t(k)] < cells) break;
      idx[size_t(k)] = 0;
      ++k;
    }
    if (k == d) break;
  }
  std::fclose(out);
  std::printf("wrote %s\n", output.c_str());
  return kOk;
}

int cmd_verify(const std::string& structure, int samples,
               std::uint64_t seed) {
  const DistanceDag dag = load_dag(structure);
  const VerifyReport report = run_verification(dag, samples, seed);
  std::fputs(report.to_string().c_str(), stdout);
  if (!report.all_pass()) {
    std::printf("verification FAILED\n");
    return kVerifyFailed;
  }
  std::printf("verification passed\n");
  return kOk;
}

int cmd_bench(const std::string& structure, int queries) {
  const DistanceDag dag = load_dag(structure);
  const int d = dag.base_dim();
  const BoundingBox bb = bounding_box(dag.normalized);
  HaltonSampler sampler(d, 7);
  std::vector<Vector> points;
  points.reserve(size_t(queries));
  while (int(points.size()) < queries) {
    Vector x = sampler.next_in_box(bb.lo, bb.hi);
    if (dag.normalized.contains(x, 0.0)) points.push_back(std::move(x));
  }

  double sink = 0.0;
  const auto t0 = std::chrono::steady_clock::now();
  for (const Vector& x : points) sink += blend_value(dag, x);
  const auto t1 = std::chrono::steady_clock::now();
  for (const Vector& x : points) sink += blend_gradient(dag, x)[0];
  const auto t2 = std::chrono::steady_clock::now();

  const double vs = std::chrono::duration<double>(t1 - t0).count();
  const double gs = std::chrono::duration<double>(t2 - t1).count();
  std::printf("queries %d\n", queries);
  std::printf("value    %.3f us/query (%.0f per second)\n",
              1e6 * vs / queries, queries / vs);
  std::printf("gradient %.3f us/query (%.0f per second)\n",
              1e6 * gs / queries, queries / gs);
  std::printf("checksum %.6g\n", sink);
  return kOk;
}

Vector vec2(double x, double y) {
  Vector v(2);
  v << x, y;
  return v;
}

Polytope make_square() {
  std::vector<Halfspace> hs(4);
  for (int i = 0; i < 4; ++i) hs[size_t(i)].a = Vector::Zero(2);
  hs[0].a[0] = 1.0;
  hs[1].a[0] = -1.0;
  hs[2].a[1] = 1.0;
  hs[3].a[1] = -1.0;
  for (auto& h : hs) h.b = 1.0;
  return Polytope(2, std::move(hs));
}

Polytope make_wedge() {
  // Thin wedge with apex at (-2, 0), opening to the right at x <= 2.
  std::vector<Halfspace> hs(3);
  hs[0].a = Vector(2);
  hs[0].a << -0.05, 1.0;
  hs[0].b = 0.1;
  hs[1].a = Vector(2);
  hs[1].a << -0.05, -1.0;
  hs[1].b = 0.1;
  hs[2].a = Vector(2);
  hs[2].a << 1.0, 0.0;
  hs[2].b = 2.0;
  return Polytope(2, std::move(hs));
}

const char* status_name(TraceStatus s) {
  switch (s) {
    case TraceStatus::Converged: return "converged";
    case TraceStatus::Cycled: return "cycled";
    default: return "max-steps";
  }
}

int cmd_demo(const std::string& which, double epsilon, std::uint64_t seed) {
  RunConfig cfg;
  cfg.epsilon = epsilon;
  cfg.seed = effective_seed(seed);

  if (which == "wedge") {
    // Walking toward the guide facet thrashes where the wedge is thinner
    // than the step: the guide flips sides on nearly every step.
    const DistanceDag dag = build_dag(make_wedge(), cfg);
    const Vector start = dag.transform.apply(vec2(-1.5, 0.0));
    const TraceField field = make_witness_foot_field(dag);
    const TraceResult r = trace_descent(field, start, 0.01, 300);
    std::printf("wedge: facet-guided walk %s after %d steps, %d jitters\n",
                status_name(r.status), r.steps, r.jitters);
    std::printf("a smooth-guided walk does not thrash: ");
    const TraceResult rs =
        trace_descent(make_blended_ascent_field(dag), start, 0.01, 300);
    std::printf("%s after %d steps, %d jitters\n", status_name(rs.status),
                rs.steps, rs.jitters);
    return kOk;
  }
  if (which == "square-loop") {
    // Walking away from the guide facet in a square bounces between the
    // facet regions instead of settling at the deepest point.
    const DistanceDag dag = build_dag(make_square(), cfg);
    const Vector start = dag.transform.apply(vec2(0.31, 0.07));
    const TraceResult r = trace_descent(make_witness_retreat_field(dag),
                                        start, 0.02, 400);
    std::printf("square: facet-retreat walk %s after %d steps, %d jitters\n",
                status_name(r.status), r.steps, r.jitters);
    return kOk;
  }
  if (which == "blended") {
    // The smooth field's gradient ascent settles near the deepest point.
    const DistanceDag dag = build_dag(make_square(), cfg);
    const Vector start = dag.transform.apply(vec2(0.31, 0.07));
    const TraceResult r = trace_descent(make_blended_ascent_field(dag),
                                        start, 0.02, 400);
    std::printf("square: smooth ascent %s after %d steps, %d jitters\n",
                status_name(r.status), r.steps, r.jitters);
    const Vector a = dag.transform.apply(vec2(-0.9, -0.37));
    const Vector b = dag.transform.apply(vec2(0.88, 0.41));
    const auto smooth = [&](const Vector& x) { return blend_value(dag, x); };
    const auto rough = [&](const Vector& x) { return witness_value(dag, x); };
    const DiscontinuityScan ss = scan_discontinuities(smooth, a, b, 1000);
    const DiscontinuityScan rs = scan_discontinuities(rough, a, b, 1000);
    std::printf("segment jumps: smooth %d (max %.3g), facet-guided %d (max %.3g)\n",
                ss.jumps, ss.max_jump, rs.jumps, rs.max_jump);
    return kOk;
  }
  throw InvalidInput("unknown demo; pick wedge, square-loop, or blended");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Smooth boundary-distance fields over convex polytopes"};
  app.require_subcommand(1);

  std::string input, output, structure, point, demo_case;
  double epsilon = 0.1, lambda_c = -1.0, lambda_p = -1.0;
  std::uint64_t seed = 0;
  int cells = 64, samples = 4000, queries = 20000;
  bool want_gradient = false, want_hessian = false;
  std::uint64_t verify_seed = 9999;

  CLI::App* build = app.add_subcommand("build", "Build a structure from a polytope JSON file");
  build->add_option("--input,-i", input, "Polytope JSON file")->required();
  build->add_option("--output,-o", output, "Structure JSON file")->required();
  build->add_option("--epsilon,-e", epsilon, "Accuracy parameter in (0, 1/2)");
  build->add_option("--seed,-s", seed, "Seed (SMOOTHDIST_SEED overrides)");
  build->add_option("--lambda-c", lambda_c, "Covering scale override");
  build->add_option("--lambda-p", lambda_p, "Packing scale override");

  CLI::App* query = app.add_subcommand("query", "Evaluate the field at a point");
  query->add_option("--structure,-f", structure, "Structure JSON file")->required();
  query->add_option("--point,-p", point, "Comma-separated coordinates")->required();
  query->add_flag("--gradient,-g", want_gradient, "Also print the gradient");
  query->add_flag("--hessian", want_hessian, "Also print the Hessian");

  CLI::App* grid = app.add_subcommand("grid", "Sample the field on a regular grid (CSV)");
  grid->add_option("--structure,-f", structure, "Structure JSON file")->required();
  grid->add_option("--output,-o", output, "CSV output file")->required();
  grid->add_option("--cells,-c", cells, "Cells per axis");

  CLI::App* verify = app.add_subcommand("verify", "Re-check the structure's invariants");
  verify->add_option("--structure,-f", structure, "Structure JSON file")->required();
  verify->add_option("--samples,-n", samples, "Sample count per check");
  verify->add_option("--seed,-s", verify_seed, "Verification sampling seed");

  CLI::App* bench = app.add_subcommand("bench", "Time value and gradient queries");
  bench->add_option("--structure,-f", structure, "Structure JSON file")->required();
  bench->add_option("--queries,-n", queries, "Number of query points");

  CLI::App* demo = app.add_subcommand("demo", "Guided walks on built-in shapes");
  demo->add_option("case", demo_case, "wedge | square-loop | blended")->required();
  demo->add_option("--epsilon,-e", epsilon, "Accuracy parameter");
  demo->add_option("--seed,-s", seed, "Seed (SMOOTHDIST_SEED overrides)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (build->parsed()) {
      return cmd_build(input, output, epsilon, seed, lambda_c, lambda_p);
    }
    if (query->parsed()) {
      return cmd_query(structure, point, want_gradient, want_hessian);
    }
    if (grid->parsed()) return cmd_grid(structure, output, cells);
    if (verify->parsed()) return cmd_verify(structure, samples, verify_seed);
    if (bench->parsed()) return cmd_bench(structure, queries);
    if (demo->parsed()) return cmd_demo(demo_case, epsilon, seed);
  } catch (const OutsidePolytope& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kOutside;
  } catch (const CoverageFailure& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kBuildFailed;
  } catch (const SolverFailure& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kBuildFailed;
  } catch (const RepresentativeValidationFailure& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kBuildFailed;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kBadInput;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kBadInput;
  }
  return kBadInput;
}

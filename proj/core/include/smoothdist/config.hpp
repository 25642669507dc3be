#pragma once

#include <cmath>
#include <cstdint>
#include <string>

namespace smoothdist {

// Every tolerance used by the library, in one place.  All values apply to
// normalized (unit diameter) coordinates unless stated otherwise.
struct Tolerances {
  double geometric = 1e-9;        // generic slack/feasibility comparisons
  double membership = 1e-12;      // "is this point inside" checks
  double unit_normal = 1e-12;     // max deviation of |a| from 1
  double solver_rel = 1e-6;       // relative optimality of ellipsoid fits
  double predicate = 1e-9;        // ellipsoid intersection decision margin
  double mollifier_cutoff = 1e-8; // weights flush to zero for f >= 1 - this
};

// Sample-count knobs for the randomized parts of construction/validation.
struct SampleCounts {
  // Worklist size for greedy center selection scales as
  // factor * delta^{-(ambient)/2} where delta is the level's expansion.
  int worklist_factor = 64;
  int coverage_verify_factor = 64;
  // Per level-0 node, sample count for the highest-reach test is
  // top_factor * 2^d in the base dimension d.
  int top_factor = 32;
  int rep_validation_factor = 32;
};

struct RunConfig {
  double epsilon = 0.1;      // accuracy parameter, must lie in (0, 1/2)
  std::uint64_t seed = 0;    // drives every quasi-random choice of a build
  // Scaling factors of covering/packing ellipsoids.  Negative means
  // "derive the default from the dimension at build time" (see lambdas()).
  double lambda_c = -1.0;
  double lambda_p = -1.0;
  Tolerances tol;
  SampleCounts samples;

  // Default covering scale in base dimension d: 1 / (2 sqrt(d+1)).
  static double default_lambda_c(int base_dim) {
    return 1.0 / (2.0 * std::sqrt(double(base_dim) + 1.0));
  }
  // Default packing scale lc / (4 beta sqrt(d+1)) with beta = (3+lc)/(1-lc).
  static double default_lambda_p(int base_dim) {
    const double lc = default_lambda_c(base_dim);
    const double beta = (3.0 + lc) / (1.0 - lc);
    return lc / (4.0 * beta * std::sqrt(double(base_dim) + 1.0));
  }

  double resolved_lambda_c(int base_dim) const {
    return lambda_c > 0.0 ? lambda_c : default_lambda_c(base_dim);
  }
  double resolved_lambda_p(int base_dim) const {
    return lambda_p > 0.0 ? lambda_p : default_lambda_p(base_dim);
  }
};

}  // namespace smoothdist

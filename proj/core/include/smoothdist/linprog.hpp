#pragma once

#include "smoothdist/linalg.hpp"

namespace smoothdist {

enum class LpStatus { Optimal, Unbounded, Infeasible };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  Vector x;             // maximizer when status == Optimal
  double value = 0.0;   // objective at x
};

// Maximize c.dot(x) subject to A*x <= b with x free.  Dense two-phase
// simplex with Bland's rule; intended for the small programs that show up
// in polytope preprocessing (boundedness probes, Chebyshev center,
// support functions), not as a general-purpose solver.
LpResult lp_maximize(const Vector& c, const Matrix& A, const Vector& b);

}  // namespace smoothdist

#pragma once

#include <functional>
#include <vector>

#include "smoothdist/dag.hpp"
#include "smoothdist/linalg.hpp"

namespace smoothdist {

// The descent leaf's owning-facet slack at x.  Piecewise linear and
// generally discontinuous across leaf switches; the smooth field exists to
// remove exactly those jumps.  Normalized coordinates.
double witness_value(const DistanceDag& dag, const Vector& x);

struct DiscontinuityScan {
  int jumps = 0;        // adjacent samples further apart than the slope bound
  double max_jump = 0.0;
  int steps = 0;
};

// Samples `field` at steps+1 points of the segment [a, b] and flags every
// adjacent difference above slope_factor times the sample spacing.
DiscontinuityScan scan_discontinuities(
    const std::function<double(const Vector&)>& field, const Vector& a,
    const Vector& b, int steps, double slope_factor = 4.0);

// A scalar field with a preferred walking direction at every point.
struct TraceField {
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> direction;
};

enum class TraceStatus { Converged, Cycled, MaxSteps };

struct TraceResult {
  TraceStatus status = TraceStatus::MaxSteps;
  Vector final_point;
  int steps = 0;
  // Count of steps whose direction opposed the previous one; a high count
  // on a short path is the thrashing signature of a discontinuous guide.
  int jitters = 0;
  std::vector<Vector> path;
};

// Fixed-step walk along field.direction.  Stops Converged when the walk
// stalls (returns to within step/10 of its position five steps ago, the
// direction vanishes, or the field reports the point left the body);
// Cycled when it revisits an older point (window 64, skipping the five
// most recent); MaxSteps otherwise.
TraceResult trace_descent(const TraceField& field, const Vector& start,
                          double step, int max_steps);

// Walk toward the descent leaf's owning facet: the straight-line route to
// the boundary under a perfect guide.
TraceField make_witness_foot_field(const DistanceDag& dag);

// Walk away from the owning facet, seeking the deepest point.
TraceField make_witness_retreat_field(const DistanceDag& dag);

// Walk up the smooth field's gradient.
TraceField make_blended_ascent_field(const DistanceDag& dag);

}  // namespace smoothdist

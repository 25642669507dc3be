#include "smoothdist/witness.hpp"

#include <algorithm>
#include <cmath>

#include "smoothdist/blend.hpp"
#include "smoothdist/errors.hpp"

namespace smoothdist {

double witness_value(const DistanceDag& dag, const Vector& x) {
  const int leaf = ray_shoot_descend(dag, x);
  const int rep = dag.levels[0].nodes[size_t(leaf)].rep_index;
  return dag.normalized.slack(rep, x);
}

DiscontinuityScan scan_discontinuities(
    const std::function<double(const Vector&)>& field, const Vector& a,
    const Vector& b, int steps, double slope_factor) {
  DiscontinuityScan scan;
  scan.steps = steps;
  const double h = (b - a).norm() / double(steps);
  double prev = field(a);
  for (int k = 1; k <= steps; ++k) {
    const double t = double(k) / double(steps);
    const double cur = field(a + t * (b - a));
    const double jump = std::abs(cur - prev);
    if (jump > slope_factor * h) ++scan.jumps;
    scan.max_jump = std::max(scan.max_jump, jump);
    prev = cur;
  }
  return scan;
}

TraceResult trace_descent(const TraceField& field, const Vector& start,
                          double step, int max_steps) {
  TraceResult result;
  result.path.push_back(start);
  result.final_point = start;
  Vector prev_dir;
  const double near = step / 10.0;
  for (int k = 0; k < max_steps; ++k) {
    Vector dir;
    try {
      dir = field.direction(result.final_point);
    } catch (const OutsidePolytope&) {
      result.status = TraceStatus::Converged;  // walked into the boundary
      return result;
    }
    const double len = dir.norm();
    if (len < 1e-15) {
      result.status = TraceStatus::Converged;
      return result;
    }
    dir /= len;
    if (prev_dir.size() > 0 && dir.dot(prev_dir) < 0.0) ++result.jitters;
    prev_dir = dir;

    result.final_point += step * dir;
    result.path.push_back(result.final_point);
    ++result.steps;

    const size_t n = result.path.size();
    if (n > 5 && (result.final_point - result.path[n - 6]).norm() < near) {
      result.status = TraceStatus::Converged;
      return result;
    }
    if (n > 6) {
      const size_t lo = n > 70 ? n - 70 : 0;
      for (size_t j = lo; j + 6 < n; ++j) {
        if ((result.final_point - result.path[j]).norm() < near) {
          result.status = TraceStatus::Cycled;
          return result;
        }
      }
    }
  }
  result.status = TraceStatus::MaxSteps;
  return result;
}

TraceField make_witness_foot_field(const DistanceDag& dag) {
  TraceField field;
  field.value = [&dag](const Vector& x) { return witness_value(dag, x); };
  field.direction = [&dag](const Vector& x) {
    const int leaf = ray_shoot_descend(dag, x);
    const int rep = dag.levels[0].nodes[size_t(leaf)].rep_index;
    return Vector(dag.normalized.halfspaces()[size_t(rep)].a);
  };
  return field;
}

TraceField make_witness_retreat_field(const DistanceDag& dag) {
  TraceField field;
  field.value = [&dag](const Vector& x) { return witness_value(dag, x); };
  field.direction = [&dag](const Vector& x) {
    const int leaf = ray_shoot_descend(dag, x);
    const int rep = dag.levels[0].nodes[size_t(leaf)].rep_index;
    return Vector(-dag.normalized.halfspaces()[size_t(rep)].a);
  };
  return field;
}

TraceField make_blended_ascent_field(const DistanceDag& dag) {
  TraceField field;
  field.value = [&dag](const Vector& x) { return blend_value(dag, x); };
  field.direction = [&dag](const Vector& x) { return blend_gradient(dag, x); };
  return field;
}

}  // namespace smoothdist

#pragma once

#include <stdexcept>
#include <string>

namespace smoothdist {

// Base class for all failures raised by this library.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input data (bad JSON, zero normals, dimension mismatch, ...).
struct InvalidInput : Error {
  using Error::Error;
};

// The halfspace intersection has a direction of recession.
struct UnboundedPolytope : Error {
  using Error::Error;
};

// The halfspace intersection has no interior point.
struct EmptyInterior : Error {
  using Error::Error;
};

// A point expected inside the body lies outside it.
struct PointOutside : Error {
  using Error::Error;
};

// A point expected strictly interior lies on or outside the boundary.
struct PointNotInterior : Error {
  using Error::Error;
};

struct NonPositiveDelta : Error {
  using Error::Error;
};

struct NonPositiveLambda : Error {
  using Error::Error;
};

// A slab collection too thin to carry a full-dimensional ellipsoid.
struct DegenerateRegion : Error {
  using Error::Error;
};

// An iterative solver failed to reach its target accuracy.
struct SolverFailure : Error {
  using Error::Error;
};

// Greedy center selection exhausted candidates with sample points uncovered.
struct CoverageFailure : Error {
  using Error::Error;
};

// A query point is outside the body (or beyond the resolvable margin).
struct OutsidePolytope : Error {
  using Error::Error;
};

// No blending patch covers the query point.
struct EmptyPatchList : Error {
  using Error::Error;
};

// Argument outside the mathematical domain of a function.
struct DomainError : Error {
  using Error::Error;
};

// A representative hyperplane failed its accuracy validation.
struct RepresentativeValidationFailure : Error {
  using Error::Error;
};

}  // namespace smoothdist

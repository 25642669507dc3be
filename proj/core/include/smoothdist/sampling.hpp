#pragma once

#include <cstdint>

#include "smoothdist/linalg.hpp"

namespace smoothdist {

// Radical-inverse of idx in the given base, in [0, 1).
double radical_inverse(std::uint64_t idx, std::uint32_t base);

// Deterministic low-discrepancy point stream (Halton, one prime base per
// coordinate).  The seed only shifts the start index, so two samplers with
// the same (dim, seed) yield identical streams.
class HaltonSampler {
 public:
  HaltonSampler(int dim, std::uint64_t seed);

  // Next point of the sequence in [0,1)^dim.
  Vector next();

  // Next point mapped affinely into the box [lo, hi].
  Vector next_in_box(const Vector& lo, const Vector& hi);

  // Allocation-free variants; out must already have size dim.
  void next_into(Vector& out);
  void next_in_box_into(const Vector& lo, const Vector& hi, Vector& out);

  std::uint64_t index() const { return index_; }

 private:
  int dim_;
  std::uint64_t index_;
};

}  // namespace smoothdist

#include "smoothdist/sampling.hpp"

#include <array>

#include "smoothdist/errors.hpp"

namespace smoothdist {
namespace {

constexpr std::array<std::uint32_t, 12> kPrimes = {2,  3,  5,  7,  11, 13,
                                                   17, 19, 23, 29, 31, 37};

std::uint64_t reverse_bits(std::uint64_t v) {
  v = ((v >> 1) & 0x5555555555555555ULL) | ((v & 0x5555555555555555ULL) << 1);
  v = ((v >> 2) & 0x3333333333333333ULL) | ((v & 0x3333333333333333ULL) << 2);
  v = ((v >> 4) & 0x0F0F0F0F0F0F0F0FULL) | ((v & 0x0F0F0F0F0F0F0F0FULL) << 4);
  v = ((v >> 8) & 0x00FF00FF00FF00FFULL) | ((v & 0x00FF00FF00FF00FFULL) << 8);
  v = ((v >> 16) & 0x0000FFFF0000FFFFULL) |
      ((v & 0x0000FFFF0000FFFFULL) << 16);
  return (v >> 32) | (v << 32);
}

// Constant base lets the compiler fold the divisions into multiply-shifts.
template <std::uint32_t Base>
double radical_inverse_fixed(std::uint64_t idx) {
  constexpr double inv = 1.0 / double(Base);
  double f = inv;
  double r = 0.0;
  while (idx > 0) {
    r += f * double(idx % Base);
    idx /= Base;
    f *= inv;
  }
  return r;
}

}  // namespace

double radical_inverse(std::uint64_t idx, std::uint32_t base) {
  switch (base) {
    case 2:
      return double(reverse_bits(idx)) * 0x1p-64;
    case 3:
      return radical_inverse_fixed<3>(idx);
    case 5:
      return radical_inverse_fixed<5>(idx);
    case 7:
      return radical_inverse_fixed<7>(idx);
    case 11:
      return radical_inverse_fixed<11>(idx);
    case 13:
      return radical_inverse_fixed<13>(idx);
    default: {
      const double inv = 1.0 / double(base);
      double f = inv;
      double r = 0.0;
      while (idx > 0) {
        r += f * double(idx % base);
        idx /= base;
        f *= inv;
      }
      return r;
    }
  }
}

HaltonSampler::HaltonSampler(int dim, std::uint64_t seed) : dim_(dim) {
  if (dim < 1 || dim > int(kPrimes.size())) {
    throw InvalidInput("HaltonSampler: unsupported dimension");
  }
  // Index 0 maps to the origin corner; skip it and offset by the seed.
  index_ = 1 + seed * 1000003ULL;
}

void HaltonSampler::next_into(Vector& out) {
  for (int k = 0; k < dim_; ++k) out[k] = radical_inverse(index_, kPrimes[k]);
  ++index_;
}

Vector HaltonSampler::next() {
  Vector p(dim_);
  next_into(p);
  return p;
}

void HaltonSampler::next_in_box_into(const Vector& lo, const Vector& hi,
                                     Vector& out) {
  next_into(out);
  for (int k = 0; k < dim_; ++k) out[k] = lo[k] + out[k] * (hi[k] - lo[k]);
}

Vector HaltonSampler::next_in_box(const Vector& lo, const Vector& hi) {
  Vector p(dim_);
  next_in_box_into(lo, hi, p);
  return p;
}

}  // namespace smoothdist

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "smoothdist/ellipsoid.hpp"
#include "smoothdist/linalg.hpp"

namespace smoothdist {

// Bucket grid over an axis-aligned range.  Boxes are inserted into every
// cell they overlap, so a point query needs to visit only its own cell.
// Coordinates outside the range clamp to the border cells, which keeps the
// overlap property: a box containing the query point always shares its cell.
class UniformGrid {
 public:
  UniformGrid(const Vector& lo, const Vector& hi, double cell_size,
              std::int64_t max_cells = std::int64_t(1) << 18)
      : lo_(lo), dim_(int(lo.size())), counts_(lo.size()), inv_width_(lo.size()) {
    cell_size = std::max(cell_size, 1e-12);
    std::int64_t total = 1;
    for (int k = 0; k < dim_; ++k) {
      const double len = std::max(hi[k] - lo[k], 1e-12);
      counts_[k] = std::max(1, int(std::ceil(len / cell_size)));
      total *= counts_[k];
    }
    while (total > max_cells) {
      int widest = 0;
      for (int k = 1; k < dim_; ++k) {
        if (counts_[k] > counts_[widest]) widest = k;
      }
      total /= counts_[widest];
      counts_[widest] = (counts_[widest] + 1) / 2;
      total *= counts_[widest];
    }
    for (int k = 0; k < dim_; ++k) {
      const double len = std::max(hi[k] - lo[k], 1e-12);
      inv_width_[k] = double(counts_[k]) / len;
    }
    cells_.resize(size_t(total));
  }

  void insert_box(const Vector& blo, const Vector& bhi, int id) {
    std::vector<int> first(dim_), last(dim_), cur(dim_);
    for (int k = 0; k < dim_; ++k) {
      first[k] = cell_index(k, blo[k]);
      last[k] = cell_index(k, bhi[k]);
      cur[k] = first[k];
    }
    for (;;) {
      cells_[flat(cur)].push_back(id);
      int k = 0;
      while (k < dim_) {
        if (cur[k] < last[k]) {
          ++cur[k];
          break;
        }
        cur[k] = first[k];
        ++k;
      }
      if (k == dim_) break;
    }
  }

  const std::vector<int>& at(const Vector& x) const {
    size_t idx = 0;
    for (int k = 0; k < dim_; ++k) {
      idx = idx * size_t(counts_[k]) + size_t(cell_index(k, x[k]));
    }
    return cells_[idx];
  }

  // Ids from every cell the box overlaps, sorted and deduplicated.
  void collect_box(const Vector& blo, const Vector& bhi,
                   std::vector<int>& out) const {
    out.clear();
    std::vector<int> first(dim_), last(dim_), cur(dim_);
    for (int k = 0; k < dim_; ++k) {
      first[k] = cell_index(k, blo[k]);
      last[k] = cell_index(k, bhi[k]);
      cur[k] = first[k];
    }
    for (;;) {
      const std::vector<int>& ids = cells_[flat(cur)];
      out.insert(out.end(), ids.begin(), ids.end());
      int k = 0;
      while (k < dim_) {
        if (cur[k] < last[k]) {
          ++cur[k];
          break;
        }
        cur[k] = first[k];
        ++k;
      }
      if (k == dim_) break;
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
  }

 private:
  int cell_index(int k, double v) const {
    const int i = int(std::floor((v - lo_[k]) * inv_width_[k]));
    return std::clamp(i, 0, counts_[k] - 1);
  }
  size_t flat(const std::vector<int>& cur) const {
    size_t idx = 0;
    for (int k = 0; k < dim_; ++k) idx = idx * size_t(counts_[k]) + size_t(cur[k]);
    return idx;
  }

  Vector lo_;
  int dim_;
  std::vector<int> counts_;
  std::vector<double> inv_width_;
  std::vector<std::vector<int>> cells_;
};

// Grid over the bounding boxes of a family of ellipsoids, cell size twice
// the mean box halfwidth.
inline UniformGrid ellipsoid_bbox_grid(const std::vector<const Ellipsoid*>& items,
                                       int dim) {
  Vector lo = Vector::Constant(dim, std::numeric_limits<double>::infinity());
  Vector hi = -lo;
  double mean_hw = 0.0;
  for (const Ellipsoid* e : items) {
    for (int k = 0; k < dim; ++k) {
      lo[k] = std::min(lo[k], e->center()[k] - e->bbox_halfwidth(k));
      hi[k] = std::max(hi[k], e->center()[k] + e->bbox_halfwidth(k));
      mean_hw += e->bbox_halfwidth(k);
    }
  }
  mean_hw /= double(items.size() * size_t(dim));
  UniformGrid grid(lo, hi, 2.0 * mean_hw);
  Vector blo(dim), bhi(dim);
  for (size_t i = 0; i < items.size(); ++i) {
    for (int k = 0; k < dim; ++k) {
      blo[k] = items[i]->center()[k] - items[i]->bbox_halfwidth(k);
      bhi[k] = items[i]->center()[k] + items[i]->bbox_halfwidth(k);
    }
    grid.insert_box(blo, bhi, int(i));
  }
  return grid;
}

}  // namespace smoothdist

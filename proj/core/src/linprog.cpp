#include "smoothdist/linprog.hpp"

#include <cmath>
#include <vector>

#include "smoothdist/errors.hpp"

namespace smoothdist {
namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kFeasTol = 1e-9;
constexpr int kMaxIters = 50000;

// Dense simplex tableau over columns [structural | slack | artificial].
// Free variables are handled by the x = u - w split before entry.
struct Tableau {
  int rows = 0;
  int cols = 0;  // excluding the rhs column
  std::vector<double> t;  // (rows+1) x (cols+1), last row = objective
  std::vector<int> basis;

  double& at(int r, int c) { return t[size_t(r) * (cols + 1) + c]; }
  double at(int r, int c) const { return t[size_t(r) * (cols + 1) + c]; }
  double& rhs(int r) { return t[size_t(r) * (cols + 1) + cols]; }
  double rhs(int r) const { return t[size_t(r) * (cols + 1) + cols]; }

  void pivot(int pr, int pc) {
    const double p = at(pr, pc);
    for (int c = 0; c <= cols; ++c) at(pr, c) /= p;
    for (int r = 0; r <= rows; ++r) {
      if (r == pr) continue;
      const double f = at(r, pc);
      if (std::abs(f) < 1e-300) continue;
      for (int c = 0; c <= cols; ++c) at(r, c) -= f * at(pr, c);
      at(r, pc) = 0.0;
    }
    basis[pr] = pc;
  }

  // Bland's rule: smallest-index entering column with positive reduced
  // cost, smallest-index leaving row among minimum ratios.  Returns
  // Optimal or Unbounded.
  LpStatus run(int usable_cols) {
    for (int iter = 0; iter < kMaxIters; ++iter) {
      int pc = -1;
      for (int c = 0; c < usable_cols; ++c) {
        if (at(rows, c) > kPivotTol) { pc = c; break; }
      }
      if (pc < 0) return LpStatus::Optimal;
      int pr = -1;
      double best = 0.0;
      for (int r = 0; r < rows; ++r) {
        const double a = at(r, pc);
        if (a <= kPivotTol) continue;
        const double ratio = rhs(r) / a;
        if (pr < 0 || ratio < best - 1e-15 ||
            (ratio < best + 1e-15 && basis[r] < basis[pr])) {
          pr = r;
          best = ratio;
        }
      }
      if (pr < 0) return LpStatus::Unbounded;
      pivot(pr, pc);
    }
    throw SolverFailure("simplex hit the iteration limit");
  }
};

}  // namespace

LpResult lp_maximize(const Vector& c, const Matrix& A, const Vector& b) {
  const int m = int(A.rows());
  const int n = int(A.cols());
  if (c.size() != n || b.size() != m) {
    throw InvalidInput("lp_maximize: inconsistent dimensions");
  }

  // Columns: u (n), w (n), slack (m), artificial (<= m).
  int n_art = 0;
  for (int i = 0; i < m; ++i) {
    if (b[i] < 0.0) ++n_art;
  }
  Tableau tab;
  tab.rows = m;
  tab.cols = 2 * n + m + n_art;
  tab.t.assign(size_t(tab.rows + 1) * (tab.cols + 1), 0.0);
  tab.basis.assign(m, -1);

  int art = 2 * n + m;
  for (int i = 0; i < m; ++i) {
    const double s = b[i] < 0.0 ? -1.0 : 1.0;
    for (int j = 0; j < n; ++j) {
      tab.at(i, j) = s * A(i, j);
      tab.at(i, n + j) = -s * A(i, j);
    }
    tab.at(i, 2 * n + i) = s;  // slack
    tab.rhs(i) = s * b[i];
    if (b[i] < 0.0) {
      tab.at(i, art) = 1.0;
      tab.basis[i] = art;
      ++art;
    } else {
      tab.basis[i] = 2 * n + i;
    }
  }

  if (n_art > 0) {
    // Phase I: maximize -sum(artificials).
    for (int i = 0; i < m; ++i) {
      if (tab.basis[i] >= 2 * n + m) {
        for (int col = 0; col <= tab.cols; ++col) {
          tab.at(tab.rows, col) += tab.at(i, col);
        }
      }
    }
    for (int j = 2 * n + m; j < tab.cols; ++j) tab.at(tab.rows, j) = 0.0;
    const LpStatus s1 = tab.run(tab.cols);
    (void)s1;  // bounded by construction: objective <= 0
    if (tab.rhs(tab.rows) > kFeasTol) {
      return {LpStatus::Infeasible, Vector(), 0.0};
    }
    // Drive any artificial still in the basis out of it.
    for (int r = 0; r < m; ++r) {
      if (tab.basis[r] < 2 * n + m) continue;
      int pc = -1;
      for (int cidx = 0; cidx < 2 * n + m; ++cidx) {
        if (std::abs(tab.at(r, cidx)) > kPivotTol) { pc = cidx; break; }
      }
      if (pc >= 0) tab.pivot(r, pc);
      // else: redundant row, leave the artificial at value zero.
    }
    for (int col = 0; col <= tab.cols; ++col) tab.at(tab.rows, col) = 0.0;
  }

  // Phase II objective: c over u, -c over w, expressed through the basis.
  for (int j = 0; j < n; ++j) {
    tab.at(tab.rows, j) = c[j];
    tab.at(tab.rows, n + j) = -c[j];
  }
  for (int r = 0; r < m; ++r) {
    const int bc = tab.basis[r];
    const double coef = tab.at(tab.rows, bc);
    if (std::abs(coef) < 1e-300) continue;
    for (int col = 0; col <= tab.cols; ++col) {
      tab.at(tab.rows, col) -= coef * tab.at(r, col);
    }
  }

  const LpStatus s2 = tab.run(2 * n + m);  // artificials stay out
  if (s2 == LpStatus::Unbounded) return {LpStatus::Unbounded, Vector(), 0.0};

  Vector x = Vector::Zero(n);
  for (int r = 0; r < m; ++r) {
    const int bc = tab.basis[r];
    if (bc < n) x[bc] += tab.rhs(r);
    else if (bc < 2 * n) x[bc - n] -= tab.rhs(r);
  }
  return {LpStatus::Optimal, x, c.dot(x)};
}

}  // namespace smoothdist

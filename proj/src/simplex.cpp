// SPDX-License-Identifier: Apache-2.0
#include "cfmimo/simplex.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace cfmimo {
namespace {

constexpr double kCostTol = 1e-9;   // reduced-cost optimality threshold
constexpr double kPivotTol = 1e-9;  // smallest admissible pivot element
constexpr double kFeasTol = 1e-7;   // phase-1 residual treated as feasible

struct Tableau {
  Matrix t;                // (m+1) x (ncols+1); last row objective, last col rhs
  std::vector<int> basis;  // variable index basic in each row
  int m = 0;
  int rhs = 0;    // rhs column index
  int limit = 0;  // entering candidates are columns [0, limit)
  int iterations = 0;
};

void pivot(Tableau& tb, int row, int col) {
  tb.t.row(row) /= tb.t(row, col);
  for (int i = 0; i <= tb.m; ++i) {
    if (i == row) continue;
    const double f = tb.t(i, col);
    if (f != 0.0) tb.t.row(i) -= f * tb.t.row(row);
  }
  tb.basis[row] = col;
}

/// Bland iterations until optimal (true) or unbounded (false).
bool iterate(Tableau& tb) {
  for (;;) {
    int enter = -1;
    for (int j = 0; j < tb.limit; ++j)
      if (tb.t(tb.m, j) < -kCostTol) {
        enter = j;
        break;
      }
    if (enter < 0) return true;

    int leave = -1;
    double best = 0.0;
    for (int i = 0; i < tb.m; ++i) {
      const double aij = tb.t(i, enter);
      if (aij <= kPivotTol) continue;
      const double ratio = tb.t(i, tb.rhs) / aij;
      const double fuzz = 1e-12 * (1.0 + std::abs(best));
      if (leave < 0 || ratio < best - fuzz ||
          (ratio <= best + fuzz && tb.basis[i] < tb.basis[leave])) {
        leave = i;
        best = ratio;
      }
    }
    if (leave < 0) return false;
    pivot(tb, leave, enter);
    if (++tb.iterations > 200000)
      throw std::runtime_error("simplex_solve: iteration budget exhausted");
  }
}

}  // namespace

LpResult simplex_solve(const Matrix& a, const Vector& b, const Vector& c) {
  const int m = static_cast<int>(a.rows());
  const int n = static_cast<int>(a.cols());
  if (b.size() != m || c.size() != n)
    throw std::invalid_argument("simplex_solve: dimension mismatch");
  if (m < 1 || n < 1) throw std::invalid_argument("simplex_solve: empty program");
  if (m > 4096 || n > 4096)
    throw std::invalid_argument("simplex_solve: program exceeds the dense-size guard");

  // Row equilibration: scale every constraint to unit max-magnitude.
  Matrix as = a;
  Vector bs = b;
  for (int i = 0; i < m; ++i) {
    const double s = as.row(i).cwiseAbs().maxCoeff();
    if (s > 0.0) {
      as.row(i) /= s;
      bs(i) /= s;
    }
  }

  // Equality form with slacks; rows born with negative rhs are negated and
  // get an artificial variable so the initial basis is feasible.
  std::vector<char> flipped(m, 0);
  std::vector<int> art_col(m, -1);
  int na = 0;
  for (int i = 0; i < m; ++i)
    if (bs(i) < 0.0) {
      flipped[i] = 1;
      as.row(i) = -as.row(i);
      bs(i) = -bs(i);
      art_col[i] = n + m + na++;
    }

  const int ncols = n + m + na;
  Tableau tb;
  tb.m = m;
  tb.rhs = ncols;
  tb.limit = n + m;  // artificials never re-enter once out
  tb.t = Matrix::Zero(m + 1, ncols + 1);
  tb.basis.resize(m);
  for (int i = 0; i < m; ++i) {
    tb.t.row(i).head(n) = as.row(i);
    tb.t(i, n + i) = flipped[i] ? -1.0 : 1.0;
    tb.t(i, tb.rhs) = bs(i);
    if (art_col[i] >= 0) {
      tb.t(i, art_col[i]) = 1.0;
      tb.basis[i] = art_col[i];
    } else {
      tb.basis[i] = n + i;
    }
  }

  LpResult result;
  if (na > 0) {
    // Phase 1: maximize minus the artificial sum, priced out over the basis.
    for (int j = n + m; j < ncols; ++j) tb.t(m, j) = 1.0;
    for (int i = 0; i < m; ++i)
      if (tb.basis[i] >= n + m) tb.t.row(m) -= tb.t.row(i);
    if (!iterate(tb))
      throw std::logic_error("simplex_solve: phase-1 objective unbounded");
    if (tb.t(m, tb.rhs) < -kFeasTol) {
      result.status = LpStatus::kInfeasible;
      result.iterations = tb.iterations;
      return result;
    }
    // Drive leftover artificials out; a row that cannot pivot is redundant
    // and its artificial stays pinned at zero.
    for (int i = 0; i < m; ++i) {
      if (tb.basis[i] < n + m) continue;
      for (int j = 0; j < n + m; ++j)
        if (std::abs(tb.t(i, j)) > kFeasTol) {
          pivot(tb, i, j);
          ++tb.iterations;
          break;
        }
    }
  }

  // Phase 2 with the real objective priced out over the current basis.
  tb.t.row(m).setZero();
  tb.t.row(m).head(n) = -c.transpose();
  for (int i = 0; i < m; ++i) {
    const double f = tb.t(m, tb.basis[i]);
    if (f != 0.0) tb.t.row(m) -= f * tb.t.row(i);
  }
  if (!iterate(tb)) {
    result.status = LpStatus::kUnbounded;
    result.iterations = tb.iterations;
    return result;
  }

  result.status = LpStatus::kOptimal;
  result.x = Vector::Zero(n);
  for (int i = 0; i < m; ++i)
    if (tb.basis[i] < n) result.x(tb.basis[i]) = std::max(0.0, tb.t(i, tb.rhs));
  result.objective = c.dot(result.x);
  result.iterations = tb.iterations;
  return result;
}

}  // namespace cfmimo

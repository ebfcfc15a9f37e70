// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "cfmimo/common.hpp"

namespace cfmimo {

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

struct LpResult {
  LpStatus status = LpStatus::kInfeasible;
  Vector x;  // primal point; meaningful only when status == kOptimal
  double objective = 0.0;
  int iterations = 0;
};

/// Maximize c^T x subject to A x <= b, x >= 0.
///
/// Dense two-phase primal simplex. Rows are equilibrated to unit
/// max-magnitude first; pivoting uses Bland's least-index rule throughout
/// (entering: lowest column with negative reduced cost; leaving: lowest basic
/// variable among the minimum-ratio rows), which cannot cycle and makes the
/// returned vertex a pure function of the inputs. Sized for the small
/// programs power control generates; refuses more than 4096 rows or columns.
LpResult simplex_solve(const Matrix& a, const Vector& b, const Vector& c);

}  // namespace cfmimo

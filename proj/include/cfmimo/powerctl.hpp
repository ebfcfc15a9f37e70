// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "cfmimo/common.hpp"
#include "cfmimo/link.hpp"

namespace cfmimo {

struct PowerSolution {
  Vector eta;           // per active UE, inside [0,1]
  double t_star = 0.0;  // min_k SINR at eta
  double w_star = 0.0;  // parametric objective of the last iteration
  int iterations = 0;
  bool converged = false;
  std::string status;
  std::vector<std::pair<double, double>> trace;  // (t_min in, w* out) per round
};

/// Parametric LP at fixed t_min: maximize w subject to, for every active k,
///   (1+t_min) coh_k eta_k - t_min (sum_k' cross_{k,k'} eta_k' + cnorm_k/rho_u) >= w
/// with 0 <= eta <= 1 and w free (split into w+ - w-). Returns (eta*, w*).
/// Always feasible and bounded for t_min >= 0.
std::pair<Vector, double> lp_solve(double t_min, const LinkStatistics& stats);

/// Max-min SINR via Dinkelbach iteration: start at t_min = 0; each round
/// solves the parametric LP, stops once w* <= epsilon, and otherwise raises
/// t_min to the min SINR the LP's eta actually achieves. The trace of
/// (t_min, w*) pairs has nondecreasing t_min and the final eta is feasible by
/// construction. Hitting max_iters leaves converged == false with a
/// diagnostic in status.
PowerSolution dinkelbach(const LinkStatistics& stats, double epsilon,
                         int max_iters = 200);

/// Bisection on t over [0, max_k coh_k rho_u / cnorm_k + margin]; each probe
/// is an LP feasibility check (w*(t) >= 0). Returns a t within tol of the
/// max-min SINR value.
double bisection_oracle(const LinkStatistics& stats, double tol);

}  // namespace cfmimo

// SPDX-License-Identifier: Apache-2.0
#include "cfmimo/powerctl.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cfmimo/simplex.hpp"

namespace cfmimo {

std::pair<Vector, double> lp_solve(double t_min, const LinkStatistics& stats) {
  if (!(t_min >= 0.0)) throw std::invalid_argument("lp_solve: t_min must be >= 0");
  const int ka = stats.num_active();
  if (ka <= 0) throw std::invalid_argument("lp_solve: statistics hold no active UEs");
  if (!(stats.rho_u > 0.0))
    throw std::invalid_argument("lp_solve: statistics carry no positive data SNR");

  // Variables: eta_0..eta_{ka-1}, then w+ and w-.
  const int n = ka + 2;
  Matrix a = Matrix::Zero(2 * ka, n);
  Vector b = Vector::Zero(2 * ka);
  Vector c = Vector::Zero(n);
  c(ka) = 1.0;
  c(ka + 1) = -1.0;
  for (int k = 0; k < ka; ++k) {
    // w - (1+t) coh_k eta_k + t sum_k' cross_{k,k'} eta_k' <= -t cnorm_k/rho_u
    for (int j = 0; j < ka; ++j) a(k, j) = t_min * stats.cross(k, j);
    a(k, k) -= (1.0 + t_min) * stats.coh(k);
    a(k, ka) = 1.0;
    a(k, ka + 1) = -1.0;
    b(k) = -t_min * stats.cnorm(k) / stats.rho_u;
    a(ka + k, k) = 1.0;  // eta_k <= 1
    b(ka + k) = 1.0;
  }

  LpResult res = simplex_solve(a, b, c);
  if (res.status != LpStatus::kOptimal)
    throw std::logic_error("lp_solve: parametric LP did not reach an optimum");
  Vector eta = res.x.head(ka).cwiseMax(0.0).cwiseMin(1.0);
  return {eta, res.x(ka) - res.x(ka + 1)};
}

PowerSolution dinkelbach(const LinkStatistics& stats, double epsilon, int max_iters) {
  if (!(epsilon > 0.0))
    throw std::invalid_argument("dinkelbach: epsilon must be positive");
  if (max_iters < 1) throw std::invalid_argument("dinkelbach: max_iters must be >= 1");

  PowerSolution sol;
  double t = 0.0;
  for (int iter = 1; iter <= max_iters; ++iter) {
    auto [eta, w] = lp_solve(t, stats);
    sol.eta = eta;
    sol.w_star = w;
    sol.iterations = iter;
    sol.trace.emplace_back(t, w);
    sol.t_star = sinr_lb(eta, stats).minCoeff();
    if (w <= epsilon) {
      sol.converged = true;
      sol.status = "converged";
      return sol;
    }
    t = std::max(t, sol.t_star);
  }
  sol.status = "iteration cap reached before w* fell to epsilon";
  return sol;
}

double bisection_oracle(const LinkStatistics& stats, double tol) {
  if (!(tol > 0.0))
    throw std::invalid_argument("bisection_oracle: tol must be positive");
  const int ka = stats.num_active();
  double hi = 0.0;
  for (int k = 0; k < ka; ++k)
    hi = std::max(hi, stats.coh(k) * stats.rho_u / stats.cnorm(k));
  hi = hi * (1.0 + 1e-9) + tol;  // strictly above any attainable SINR
  double lo = 0.0;               // t = 0 is always feasible
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (lp_solve(mid, stats).second >= 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace cfmimo

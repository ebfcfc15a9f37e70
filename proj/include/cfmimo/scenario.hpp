// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "cfmimo/common.hpp"
#include "cfmimo/config.hpp"
#include "cfmimo/rng.hpp"

namespace cfmimo {

/// Geometry and large-scale state of one network drop.
struct Scenario {
  Matrix ap_xy;   // L x 2, meters
  Matrix ue_xy;   // K x 2, meters
  Matrix beta;    // K x L, linear large-scale gain
  Matrix mean_aoa;  // K x L, radians in [-pi/2, pi/2]
  /// Per UE: AP indices sorted by descending beta (ties to the lower index),
  /// truncated to the minimal prefix whose gain share reaches lambda.
  std::vector<std::vector<int>> serving;
  Matrix mask;    // K x L, 1 if AP serves UE (nu in the estimator weighting)
  double rho_p = 0.0;  // normalized pilot SNR
  double rho_u = 0.0;  // normalized data SNR
  uint64_t seed = 0;   // seed the drop was built from; keys cached statistics

  int num_ues() const { return static_cast<int>(beta.rows()); }
  int num_aps() const { return static_cast<int>(beta.cols()); }
};

/// Three-slope path loss in dB at distance d (meters). Uses the COST-Hata
/// style fixed term chi(f_c, h_AP, h_u); carrier frequency in MHz.
double path_loss_db(double distance_m, const SystemConfig& cfg);

/// The fixed term chi of the path-loss model, in dB.
double path_loss_chi_db(const SystemConfig& cfg);

/// Serving set of one UE given its gain row: minimal descending-beta prefix
/// reaching lambda * sum(beta_row). lambda >= 1 selects every AP.
std::vector<int> select_serving_aps(const Vector& beta_row, double lambda);

/// Drop APs and UEs uniformly in the square, draw shadowing (only beyond d_1)
/// and mean AoAs, derive serving sets and normalized SNRs. Deterministic in
/// (cfg, seed): identical inputs give bit-identical scenarios.
Scenario build_scenario(const SystemConfig& cfg, uint64_t seed);

}  // namespace cfmimo

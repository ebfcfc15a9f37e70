// SPDX-License-Identifier: Apache-2.0
#include "cfmimo/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace cfmimo {

double path_loss_chi_db(const SystemConfig& cfg) {
  double lf = std::log10(cfg.carrier_freq_mhz);
  return 46.3 + 33.9 * lf - 13.82 * std::log10(cfg.ap_height_m) -
         (1.1 * lf - 0.7) * cfg.ue_height_m + (1.56 * lf - 0.8);
}

double path_loss_db(double distance_m, const SystemConfig& cfg) {
  if (!(distance_m > 0.0))
    throw std::invalid_argument("path_loss_db: distance must be positive");
  double chi = path_loss_chi_db(cfg);
  // COST-Hata slopes take the distance in kilometres; the breakpoints that
  // select the slope are configured in metres.
  double d_km = distance_m / 1000.0;
  double d0_km = cfg.breakpoint_d0_m / 1000.0;
  double d1_km = cfg.breakpoint_d1_m / 1000.0;
  if (distance_m > cfg.breakpoint_d1_m) return -chi - 35.0 * std::log10(d_km);
  if (distance_m > cfg.breakpoint_d0_m)
    return -chi - 15.0 * std::log10(d1_km) - 20.0 * std::log10(d_km);
  return -chi - 15.0 * std::log10(d1_km) - 20.0 * std::log10(d0_km);
}

std::vector<int> select_serving_aps(const Vector& beta_row, double lambda) {
  const int num_aps = static_cast<int>(beta_row.size());
  if (num_aps == 0) throw std::invalid_argument("select_serving_aps: empty gain row");
  std::vector<int> order(num_aps);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return beta_row[a] > beta_row[b]; });
  if (lambda >= 1.0) return order;  // full set; avoids an FP-equality race at the tail
  double total = 0.0;
  for (int l : order) total += beta_row[l];
  double threshold = lambda * total;
  double cum = 0.0;
  std::vector<int> serving;
  for (int l : order) {
    serving.push_back(l);
    cum += beta_row[l];
    if (cum >= threshold) break;
  }
  return serving;
}

namespace {

/// Bearing from AP to UE folded onto [-pi/2, pi/2]. asin(sin(.)) keeps the
/// array response identical: the steering vector depends on the bearing only
/// through its sine.
double folded_bearing(double dx, double dy) {
  return std::asin(std::sin(std::atan2(dy, dx)));
}

}  // namespace

Scenario build_scenario(const SystemConfig& cfg, uint64_t seed) {
  cfg.validate();
  const int num_ues = cfg.num_ues;
  const int num_aps = cfg.num_aps;

  Scenario scn;
  scn.seed = seed;
  Rng rng(seed);

  scn.ap_xy.resize(num_aps, 2);
  for (int l = 0; l < num_aps; ++l) {
    scn.ap_xy(l, 0) = rng.uniform(0.0, cfg.area_side_m);
    scn.ap_xy(l, 1) = rng.uniform(0.0, cfg.area_side_m);
  }
  scn.ue_xy.resize(num_ues, 2);
  for (int k = 0; k < num_ues; ++k) {
    scn.ue_xy(k, 0) = rng.uniform(0.0, cfg.area_side_m);
    scn.ue_xy(k, 1) = rng.uniform(0.0, cfg.area_side_m);
  }

  scn.beta.resize(num_ues, num_aps);
  scn.mean_aoa.resize(num_ues, num_aps);
  for (int k = 0; k < num_ues; ++k) {
    for (int l = 0; l < num_aps; ++l) {
      double dx = scn.ue_xy(k, 0) - scn.ap_xy(l, 0);
      double dy = scn.ue_xy(k, 1) - scn.ap_xy(l, 1);
      double dist = std::hypot(dx, dy);
      if (dist < 1e-6) dist = 1e-6;  // co-located drop; clamp instead of a 0-distance throw
      double gain_db = path_loss_db(dist, cfg);
      double shadow = rng.gaussian() * cfg.shadow_sigma_db;  // drawn unconditionally,
      if (dist > cfg.breakpoint_d1_m) gain_db += shadow;     // applied only beyond d_1
      scn.beta(k, l) = std::pow(10.0, gain_db / 10.0);
      scn.mean_aoa(k, l) =
          cfg.random_aoa ? rng.uniform(-kPi / 2.0, kPi / 2.0) : folded_bearing(dx, dy);
    }
  }

  scn.serving.resize(num_ues);
  scn.mask = Matrix::Zero(num_ues, num_aps);
  for (int k = 0; k < num_ues; ++k) {
    scn.serving[k] =
        select_serving_aps(scn.beta.row(k).transpose(), cfg.ap_selection_threshold);
    for (int l : scn.serving[k]) scn.mask(k, l) = 1.0;
  }

  scn.rho_p = cfg.normalized_snr();
  scn.rho_u = cfg.normalized_snr();
  return scn;
}

}  // namespace cfmimo

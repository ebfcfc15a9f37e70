// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

namespace cfmimo {

/// Full system parameterization. Defaults reproduce the reference urban
/// deployment: 20 MHz at 2 GHz, 1024 subcarriers with a 144-sample CP,
/// 200 users over a 1 km^2 square served by 10 hundred-antenna arrays.
struct SystemConfig {
  // OFDM numerology
  int num_subcarriers = 1024;  // N_c
  int cp_length = 144;         // N_cp, also the delay-domain model width
  int pilot_symbols = 1;       // Z, OFDM symbols per pilot burst
  int slot_symbols = 7;        // Z_a, OFDM symbols per slot
  int frame_slots = 4;         // R, slots per activity-detection frame
  double sample_duration_s = 48.8e-9;
  double bandwidth_hz = 20e6;
  double carrier_freq_mhz = 2000.0;

  // Network geometry
  int antennas_per_ula = 100;  // N
  int num_aps = 10;            // L
  int num_ues = 200;           // K
  double area_side_m = 1000.0;
  double ap_height_m = 15.0;
  double ue_height_m = 1.65;

  // Large-scale propagation
  double breakpoint_d0_m = 10.0;
  double breakpoint_d1_m = 50.0;
  double shadow_sigma_db = 8.0;
  double tx_power_w = 0.5;
  double noise_figure_db = 9.0;

  // Angle-delay power spectrum
  double angle_spread_rad = 0.0349065850398866;  // 2 degrees
  double delay_spread_s = 0.2e-6;
  int num_taps = 30;       // delay-domain support, clipped to cp_length
  bool random_aoa = false; // true: draw mean AoA uniformly instead of geometric bearing

  // Access and allocation
  int num_clusters = 2;                 // J
  int apsp_set_size = 4;                // |Y|, shifts per UE
  double ap_selection_threshold = 0.7;  // lambda
  double overlap_threshold = 1e-8;      // gamma (use 1e-13 when pilot_symbols = 2)
  double activation_prob = 0.25;        // p_a

  // Power control
  double dinkelbach_tol = 0.02;
  int power_control_subcarrier = 0;

  // Monte Carlo
  int mc_samples = 1000;
  uint64_t rng_seed = 1;

  /// Reference deployment of the table above, unmodified.
  static SystemConfig table_defaults();

  /// Small dimensions that keep every structural relationship intact while
  /// running in seconds: N=16, L=6, N_c=128, N_cp=16, K=40.
  static SystemConfig desk_scale();

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;

  int effective_taps() const { return num_taps < cp_length ? num_taps : cp_length; }
  int total_antennas() const { return antennas_per_ula * num_aps; }
  int shift_universe_size() const { return num_subcarriers * pilot_symbols; }

  /// Thermal noise power in W over the configured bandwidth.
  double noise_power_w() const;
  /// Normalized pilot/data SNR rho = P_x / sigma_w^2.
  double normalized_snr() const;
  /// Pre-log factor: CP overhead times the pilot/data split of a slot.
  double prelog_factor() const;
};

/// Parse "key = value" lines ('#' comments, blank lines allowed) on top of
/// `base`. Unknown keys raise std::invalid_argument naming the key.
SystemConfig parse_config(std::istream& in, const SystemConfig& base);
SystemConfig parse_config_file(const std::string& path, const SystemConfig& base);

/// Emit every key in canonical order, parseable by parse_config.
void write_config(std::ostream& out, const SystemConfig& cfg);

}  // namespace cfmimo

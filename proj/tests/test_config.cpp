// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "cfmimo/config.hpp"

using namespace cfmimo;

TEST_CASE("reference defaults validate and derived scalars match precomputed values") {
  SystemConfig cfg = SystemConfig::table_defaults();
  CHECK_NOTHROW(cfg.validate());
  CHECK(cfg.num_subcarriers == 1024);
  CHECK(cfg.cp_length == 144);
  CHECK(cfg.num_ues == 200);
  CHECK(cfg.effective_taps() == 30);
  CHECK(cfg.total_antennas() == 1000);
  CHECK(cfg.shift_universe_size() == 1024);

  // 20 MHz * k_B * 290 K * 10^(9/10), computed with an independent script.
  CHECK(cfg.noise_power_w() == doctest::Approx(6.362410294495e-13).epsilon(1e-12));
  CHECK(cfg.normalized_snr() == doctest::Approx(7.858656968927e+11).epsilon(1e-12));
  // (1024/1168) * (6/7)
  CHECK(cfg.prelog_factor() == doctest::Approx(0.751467710372).epsilon(1e-11));
}

TEST_CASE("desk scale shrinks dimensions but keeps the structure valid") {
  SystemConfig cfg = SystemConfig::desk_scale();
  CHECK_NOTHROW(cfg.validate());
  CHECK(cfg.antennas_per_ula == 16);
  CHECK(cfg.num_aps == 6);
  CHECK(cfg.num_subcarriers == 128);
  CHECK(cfg.cp_length == 16);
  CHECK(cfg.num_ues == 40);
  CHECK(cfg.num_taps == 4);  // scaled with the CP, mirroring 30 of 144
  CHECK(cfg.effective_taps() == 4);
  CHECK(cfg.prelog_factor() ==
        doctest::Approx((128.0 / 144.0) * (6.0 / 7.0)).epsilon(1e-12));
}

TEST_CASE("validate names the offending field") {
  SystemConfig cfg = SystemConfig::table_defaults();

  SUBCASE("cp length cannot exceed the subcarrier count") {
    cfg.cp_length = cfg.num_subcarriers + 1;
    CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("cp_length"),
                         std::invalid_argument);
  }
  SUBCASE("pilot symbols must leave room for data") {
    cfg.pilot_symbols = cfg.slot_symbols;
    CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("pilot_symbols"),
                         std::invalid_argument);
  }
  SUBCASE("activation probability is a probability") {
    cfg.activation_prob = 1.5;
    CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("activation_prob"),
                         std::invalid_argument);
  }
  SUBCASE("power-control subcarrier must exist") {
    cfg.power_control_subcarrier = cfg.num_subcarriers;
    CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("power_control_subcarrier"),
                         std::invalid_argument);
  }
  SUBCASE("clusters cannot outnumber UEs") {
    cfg.num_clusters = cfg.num_ues + 1;
    CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("num_clusters"),
                         std::invalid_argument);
  }
  SUBCASE("APSP set must fit in the shift universe") {
    cfg.apsp_set_size = cfg.shift_universe_size() + 1;
    CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("apsp_set_size"),
                         std::invalid_argument);
  }
}

TEST_CASE("config text round trip preserves every field") {
  SystemConfig cfg = SystemConfig::desk_scale();
  cfg.angle_spread_rad = 0.123456789012345;
  cfg.delay_spread_s = 3.25e-7;
  cfg.apsp_set_size = 3;
  cfg.rng_seed = 42;
  cfg.random_aoa = true;

  std::stringstream text;
  write_config(text, cfg);
  SystemConfig back = parse_config(text, SystemConfig::table_defaults());

  CHECK(back.num_subcarriers == cfg.num_subcarriers);
  CHECK(back.cp_length == cfg.cp_length);
  CHECK(back.pilot_symbols == cfg.pilot_symbols);
  CHECK(back.slot_symbols == cfg.slot_symbols);
  CHECK(back.frame_slots == cfg.frame_slots);
  CHECK(back.sample_duration_s == cfg.sample_duration_s);
  CHECK(back.bandwidth_hz == cfg.bandwidth_hz);
  CHECK(back.carrier_freq_mhz == cfg.carrier_freq_mhz);
  CHECK(back.antennas_per_ula == cfg.antennas_per_ula);
  CHECK(back.num_aps == cfg.num_aps);
  CHECK(back.num_ues == cfg.num_ues);
  CHECK(back.area_side_m == cfg.area_side_m);
  CHECK(back.ap_height_m == cfg.ap_height_m);
  CHECK(back.ue_height_m == cfg.ue_height_m);
  CHECK(back.breakpoint_d0_m == cfg.breakpoint_d0_m);
  CHECK(back.breakpoint_d1_m == cfg.breakpoint_d1_m);
  CHECK(back.shadow_sigma_db == cfg.shadow_sigma_db);
  CHECK(back.tx_power_w == cfg.tx_power_w);
  CHECK(back.noise_figure_db == cfg.noise_figure_db);
  CHECK(back.angle_spread_rad == cfg.angle_spread_rad);
  CHECK(back.delay_spread_s == cfg.delay_spread_s);
  CHECK(back.num_taps == cfg.num_taps);
  CHECK(back.random_aoa == cfg.random_aoa);
  CHECK(back.num_clusters == cfg.num_clusters);
  CHECK(back.apsp_set_size == cfg.apsp_set_size);
  CHECK(back.ap_selection_threshold == cfg.ap_selection_threshold);
  CHECK(back.overlap_threshold == cfg.overlap_threshold);
  CHECK(back.activation_prob == cfg.activation_prob);
  CHECK(back.dinkelbach_tol == cfg.dinkelbach_tol);
  CHECK(back.power_control_subcarrier == cfg.power_control_subcarrier);
  CHECK(back.mc_samples == cfg.mc_samples);
  CHECK(back.rng_seed == cfg.rng_seed);
}

TEST_CASE("parse applies overrides on top of the base and keeps the rest") {
  std::stringstream text;
  text << "# a comment line\n"
       << "\n"
       << "num_ues = 12\n"
       << "angle_spread_rad = 0.1\n";
  SystemConfig cfg = parse_config(text, SystemConfig::table_defaults());
  CHECK(cfg.num_ues == 12);
  CHECK(cfg.angle_spread_rad == 0.1);
  CHECK(cfg.num_subcarriers == 1024);  // untouched default
}

TEST_CASE("parse rejects unknown keys by name") {
  std::stringstream text;
  text << "no_such_knob = 3\n";
  CHECK_THROWS_WITH_AS(parse_config(text, SystemConfig::table_defaults()),
                       doctest::Contains("no_such_knob"), std::invalid_argument);
}

TEST_CASE("parse_config_file reports a missing file") {
  CHECK_THROWS_AS(
      parse_config_file("/nonexistent/cfmimo.cfg", SystemConfig::table_defaults()),
      std::runtime_error);
}

// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "cfmimo/config.hpp"
#include "cfmimo/scenario.hpp"

using namespace cfmimo;

TEST_CASE("path-loss fixed term and slope values match precomputed references") {
  SystemConfig cfg = SystemConfig::table_defaults();
  // 46.3 + 33.9 log10(2000) - 13.82 log10(15) - (1.1 log10(2000) - 0.7) * 1.65
  //      + (1.56 log10(2000) - 0.8), from an independent script.
  CHECK(path_loss_chi_db(cfg) == doctest::Approx(141.464573003965).epsilon(1e-12));
  CHECK(path_loss_db(1000.0, cfg) == doctest::Approx(-141.464573003965).epsilon(1e-12));
  CHECK(path_loss_db(300.0, cfg) == doctest::Approx(-123.163816919153).epsilon(1e-12));
  CHECK(path_loss_db(50.0, cfg) == doctest::Approx(-95.928523155726).epsilon(1e-12));
  CHECK(path_loss_db(10.0, cfg) == doctest::Approx(-81.949123069005).epsilon(1e-12));
  // Below the near breakpoint the loss is flat.
  CHECK(path_loss_db(5.0, cfg) == path_loss_db(10.0, cfg));
  CHECK(path_loss_db(0.5, cfg) == path_loss_db(10.0, cfg));
}

TEST_CASE("path loss is continuous at both breakpoints and nonincreasing in distance") {
  SystemConfig cfg = SystemConfig::table_defaults();
  const double eps = 1e-9;
  CHECK(path_loss_db(cfg.breakpoint_d0_m - eps, cfg) ==
        doctest::Approx(path_loss_db(cfg.breakpoint_d0_m + eps, cfg)).epsilon(1e-9));
  CHECK(path_loss_db(cfg.breakpoint_d1_m - eps, cfg) ==
        doctest::Approx(path_loss_db(cfg.breakpoint_d1_m + eps, cfg)).epsilon(1e-9));

  double prev = path_loss_db(1.0, cfg);
  for (double d = 2.0; d <= 2000.0; d += 1.0) {
    double cur = path_loss_db(d, cfg);
    CHECK(cur <= prev + 1e-12);
    prev = cur;
  }

  CHECK_THROWS_AS(path_loss_db(0.0, cfg), std::invalid_argument);
  CHECK_THROWS_AS(path_loss_db(-3.0, cfg), std::invalid_argument);
}

TEST_CASE("serving-set selection keeps the minimal strongest prefix") {
  Vector row(3);
  row << 0.5, 0.3, 0.2;
  CHECK(select_serving_aps(row, 0.7) == std::vector<int>{0, 1});
  CHECK(select_serving_aps(row, 0.5) == std::vector<int>{0});
  CHECK(select_serving_aps(row, 1.0) == std::vector<int>{0, 1, 2});

  // Ties in gain break toward the lower AP index.
  Vector tied(3);
  tied << 0.4, 0.4, 0.2;
  CHECK(select_serving_aps(tied, 0.5) == std::vector<int>{0, 1});
  CHECK(select_serving_aps(tied, 0.3) == std::vector<int>{0});
}

TEST_CASE("scenario builds are deterministic in (config, seed)") {
  SystemConfig cfg = SystemConfig::desk_scale();
  cfg.num_ues = 10;
  Scenario a = build_scenario(cfg, 7);
  Scenario b = build_scenario(cfg, 7);
  Scenario c = build_scenario(cfg, 8);

  CHECK(a.seed == 7);
  CHECK((a.beta - b.beta).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.ue_xy - b.ue_xy).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.mean_aoa - b.mean_aoa).cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.serving == b.serving);
  CHECK((a.beta - c.beta).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("scenario fields stay in their domains") {
  SystemConfig cfg = SystemConfig::desk_scale();
  cfg.num_ues = 12;
  Scenario scn = build_scenario(cfg, 3);

  CHECK(scn.num_ues() == 12);
  CHECK(scn.num_aps() == cfg.num_aps);
  CHECK(scn.ap_xy.minCoeff() >= 0.0);
  CHECK(scn.ap_xy.maxCoeff() <= cfg.area_side_m);
  CHECK(scn.ue_xy.minCoeff() >= 0.0);
  CHECK(scn.ue_xy.maxCoeff() <= cfg.area_side_m);
  CHECK(scn.mean_aoa.minCoeff() >= -kPi / 2.0);
  CHECK(scn.mean_aoa.maxCoeff() <= kPi / 2.0);
  CHECK(scn.beta.minCoeff() > 0.0);
  CHECK(scn.rho_p == cfg.normalized_snr());
  CHECK(scn.rho_u == cfg.normalized_snr());

  for (int k = 0; k < scn.num_ues(); ++k) {
    REQUIRE(!scn.serving[k].empty());
    // Serving lists are descending in gain and agree with the mask.
    for (size_t i = 1; i < scn.serving[k].size(); ++i)
      CHECK(scn.beta(k, scn.serving[k][i - 1]) >= scn.beta(k, scn.serving[k][i]));
    double mask_count = scn.mask.row(k).sum();
    CHECK(mask_count == doctest::Approx(double(scn.serving[k].size())));
    for (int l : scn.serving[k]) CHECK(scn.mask(k, l) == 1.0);
  }
}

TEST_CASE("shadowing perturbs only links beyond the far breakpoint") {
  SystemConfig cfg = SystemConfig::desk_scale();
  cfg.area_side_m = 60.0;  // most links land inside 50 m, some outside
  cfg.num_ues = 30;
  cfg.num_aps = 4;
  Scenario scn = build_scenario(cfg, 11);

  int near_links = 0;
  int far_deviating = 0;
  for (int k = 0; k < scn.num_ues(); ++k) {
    for (int l = 0; l < scn.num_aps(); ++l) {
      double d = std::hypot(scn.ue_xy(k, 0) - scn.ap_xy(l, 0),
                            scn.ue_xy(k, 1) - scn.ap_xy(l, 1));
      double gain_db = 10.0 * std::log10(scn.beta(k, l));
      if (d <= cfg.breakpoint_d1_m) {
        ++near_links;
        CHECK(gain_db == doctest::Approx(path_loss_db(d, cfg)).epsilon(1e-9));
      } else if (std::abs(gain_db - path_loss_db(d, cfg)) > 0.01) {
        ++far_deviating;
      }
    }
  }
  CHECK(near_links > 0);
  CHECK(far_deviating > 0);
}

TEST_CASE("random mean-AoA mode replaces the geometric bearing") {
  SystemConfig cfg = SystemConfig::desk_scale();
  cfg.num_ues = 8;
  Scenario geo = build_scenario(cfg, 5);
  cfg.random_aoa = true;
  Scenario rnd = build_scenario(cfg, 5);
  // Same geometry stream, different AoA values.
  CHECK((geo.mean_aoa - rnd.mean_aoa).cwiseAbs().maxCoeff() > 0.0);
  CHECK(rnd.mean_aoa.minCoeff() >= -kPi / 2.0);
  CHECK(rnd.mean_aoa.maxCoeff() <= kPi / 2.0);
}

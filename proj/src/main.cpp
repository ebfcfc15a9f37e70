// SPDX-License-Identifier: Apache-2.0
#include <cstdint>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cfmimo/config.hpp"
#include "cfmimo/experiment.hpp"

namespace {

struct CommonOpts {
  std::string config;
  bool table_defaults = false;
  std::vector<uint64_t> seeds{1, 2, 3, 4, 5};
  std::string out;
  int trials = 0;
  int subcarrier = 0;
};

void add_common(CLI::App* sub, CommonOpts& o) {
  sub->add_option("--config", o.config,
                  "key = value config file applied over the base profile")
      ->check(CLI::ExistingFile);
  sub->add_flag("--table-defaults", o.table_defaults,
                "base profile: full-scale reference instead of desk scale");
  sub->add_option("--seed", o.seeds, "comma-separated seed list")->delimiter(',');
  sub->add_option("--out", o.out, "output path ('-' or absent: stdout)");
  sub->add_option("--trials", o.trials, "Monte-Carlo trial override (0 keeps config)");
  sub->add_option("--subcarrier", o.subcarrier, "evaluation subcarrier index");
}

cfmimo::SystemConfig load_config(const CommonOpts& o) {
  cfmimo::SystemConfig base = o.table_defaults
                                  ? cfmimo::SystemConfig::table_defaults()
                                  : cfmimo::SystemConfig::desk_scale();
  if (!o.config.empty()) base = cfmimo::parse_config_file(o.config, base);
  base.validate();
  return base;
}

cfmimo::ExperimentSpec make_spec(cfmimo::ExperimentKind kind, const CommonOpts& o) {
  cfmimo::ExperimentSpec spec;
  spec.kind = kind;
  spec.cfg = load_config(o);
  spec.seeds = o.seeds;
  spec.out_path = o.out;
  spec.trials = o.trials;
  spec.subcarrier = o.subcarrier;
  return spec;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cell-free massive MIMO-OFDM uplink simulator"};
  app.require_subcommand(1);

  CommonOpts mse_opts;
  std::string sweep = "ka";
  std::vector<double> mse_grid;
  CLI::App* mse = app.add_subcommand(
      "mse-sweep", "expected channel-estimation error against K_a or a spread");
  add_common(mse, mse_opts);
  mse->add_option("--sweep", sweep, "sweep axis: ka, angle or delay")
      ->check(CLI::IsMember({"ka", "angle", "delay"}));
  mse->add_option("--grid", mse_grid,
                  "comma-separated sweep values (counts, radians or seconds)")
      ->delimiter(',');

  CommonOpts cdf_opts;
  CLI::App* cdf = app.add_subcommand(
      "mse-cdf", "per-drop expected channel-estimation error, one value per seed");
  add_common(cdf, cdf_opts);

  CommonOpts se_opts;
  bool se_genie = false;
  CLI::App* se = app.add_subcommand(
      "se-cdf", "per-UE spectral-efficiency lower bound at full power");
  add_common(se, se_opts);
  se->add_flag("--genie", se_genie, "also evaluate the estimate-conditioned SE");

  CommonOpts det_opts;
  std::vector<double> boosts{1.0};
  double percentile = 0.99;
  CLI::App* det =
      app.add_subcommand("detect", "activity-detection error rates per seed");
  add_common(det, det_opts);
  det->add_option("--boost", boosts, "pilot-power multipliers to sweep")
      ->delimiter(',');
  det->add_option("--percentile", percentile,
                  "silent-statistic calibration quantile in (0, 1]");

  CommonOpts pc_opts;
  double epsilon = 0.0;
  int max_iters = 200;
  bool pc_genie = false;
  CLI::App* pc =
      app.add_subcommand("power-control", "max-min power-control summary per seed");
  add_common(pc, pc_opts);
  pc->add_option("--epsilon", epsilon,
                 "Dinkelbach stopping threshold (0 keeps config)");
  pc->add_option("--max-iters", max_iters, "Dinkelbach iteration cap");
  pc->add_flag("--genie", pc_genie, "also evaluate the estimate-conditioned SE");

  std::string val_config;
  std::string val_out;
  CLI::App* val = app.add_subcommand(
      "validate", "parse a config over the reference defaults and print it normalized");
  val->add_option("--config", val_config, "config file to validate")
      ->check(CLI::ExistingFile);
  val->add_option("--out", val_out, "output path ('-' or absent: stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (mse->parsed()) {
      cfmimo::ExperimentSpec spec =
          make_spec(sweep == "ka" ? cfmimo::ExperimentKind::kMseVsActive
                                  : cfmimo::ExperimentKind::kMseVsSpread,
                    mse_opts);
      spec.sweep_param = sweep == "delay" ? "delay" : "angle";
      if (!mse_grid.empty()) {
        spec.grid = mse_grid;
      } else if (sweep == "ka") {
        spec.grid = {2.0, 4.0, 6.0, 8.0};
      } else if (sweep == "angle") {
        spec.grid = {0.1396263402, 0.0698131701, 0.0349065850};  // 8, 4, 2 degrees
      } else {
        spec.grid = {2e-7, 1e-7, 5e-8};
      }
      cfmimo::run_experiment(spec);
    } else if (cdf->parsed()) {
      cfmimo::run_experiment(make_spec(cfmimo::ExperimentKind::kMseCdf, cdf_opts));
    } else if (se->parsed()) {
      cfmimo::ExperimentSpec spec = make_spec(cfmimo::ExperimentKind::kSeCdf, se_opts);
      spec.genie = se_genie;
      cfmimo::run_experiment(spec);
    } else if (det->parsed()) {
      cfmimo::ExperimentSpec spec = make_spec(cfmimo::ExperimentKind::kDetect, det_opts);
      spec.grid = boosts;
      spec.detect_percentile = percentile;
      cfmimo::run_experiment(spec);
    } else if (pc->parsed()) {
      cfmimo::ExperimentSpec spec =
          make_spec(cfmimo::ExperimentKind::kPowerControl, pc_opts);
      spec.epsilon = epsilon;
      spec.max_iters = max_iters;
      spec.genie = pc_genie;
      cfmimo::run_experiment(spec);
    } else if (val->parsed()) {
      cfmimo::SystemConfig cfg = cfmimo::SystemConfig::table_defaults();
      if (!val_config.empty()) cfg = cfmimo::parse_config_file(val_config, cfg);
      cfg.validate();
      if (val_out.empty() || val_out == "-") {
        cfmimo::write_config(std::cout, cfg);
      } else {
        std::ofstream out(val_out);
        if (!out)
          throw std::runtime_error("validate: cannot open output file " + val_out);
        cfmimo::write_config(out, cfg);
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

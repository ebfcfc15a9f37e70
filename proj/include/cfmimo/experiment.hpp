// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "cfmimo/config.hpp"

namespace cfmimo {

enum class ExperimentKind {
  kMseVsActive,   // expected estimation error against the active-UE count
  kMseVsSpread,   // expected estimation error against angle or delay spread
  kMseCdf,        // per-drop expected estimation error, one value per seed
  kSeCdf,         // per-UE SE lower bound (optionally conditional SE) at full power
  kDetect,        // activity-detection error rates against a pilot-power boost
  kPowerControl,  // max-min power-control summary per seed
};

const char* experiment_kind_name(ExperimentKind kind);

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::kMseVsActive;
  SystemConfig cfg;
  /// Sweep values. kMseVsActive: active counts; kMseVsSpread: spreads in the
  /// config's units (radians / seconds); kDetect: pilot-power multipliers;
  /// other kinds take the single placeholder 0.
  std::vector<double> grid{0.0};
  std::string sweep_param = "angle";  // kMseVsSpread: "angle" or "delay"
  std::vector<uint64_t> seeds{1};
  std::string out_path;  // empty or "-" means stdout
  int trials = 0;        // 0 keeps cfg.mc_samples
  int subcarrier = 0;
  double epsilon = 0.0;  // 0 keeps cfg.dinkelbach_tol
  int max_iters = 200;
  bool genie = false;                // kSeCdf/kPowerControl: also evaluate the estimate-conditioned SE
  double detect_percentile = 0.99;   // silent-statistic calibration quantile

  /// Throws std::invalid_argument on empty grids, duplicate or missing seeds,
  /// or sweep values outside their domain.
  void validate() const;
};

/// Runs the experiment and writes one self-describing text table to `out`:
/// header lines starting with '#' (schema id, kind, grid-axis meaning, column
/// names) followed by "seed grid label value stderr" rows. Grid points are
/// emitted and flushed in order; per-seed work inside a grid point may run on
/// worker threads but rows are written in seed-list order, so identical specs
/// produce byte-identical bytes.
void run_experiment(const ExperimentSpec& spec, std::ostream& out);

/// Same, writing to spec.out_path (stdout when empty or "-").
void run_experiment(const ExperimentSpec& spec);

}  // namespace cfmimo

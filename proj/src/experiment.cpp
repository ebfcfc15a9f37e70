// SPDX-License-Identifier: Apache-2.0
#include "cfmimo/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <iostream>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "cfmimo/activity.hpp"
#include "cfmimo/allocation.hpp"
#include "cfmimo/channel.hpp"
#include "cfmimo/link.hpp"
#include "cfmimo/powerctl.hpp"
#include "cfmimo/rng.hpp"
#include "cfmimo/scenario.hpp"

namespace cfmimo {
namespace {

// Fixed per-purpose RNG substream ids; changing these changes every output.
constexpr uint64_t kStreamAlloc = 1;
constexpr uint64_t kStreamPsop = 2;
constexpr uint64_t kStreamApsp = 3;
constexpr uint64_t kStreamActivity = 4;
constexpr uint64_t kStreamMc = 5;
constexpr uint64_t kStreamPatterns = 6;
constexpr uint64_t kStreamCalibrate = 7;
constexpr uint64_t kStreamFrame = 8;
constexpr uint64_t kStreamLink = 9;

void append_row(std::string& out, uint64_t seed, double grid, const char* label,
                double value, double err) {
  char buf[192];
  std::snprintf(buf, sizeof buf, "%llu %.10g %s %.10g %.10g\n",
                static_cast<unsigned long long>(seed), grid, label, value, err);
  out += buf;
}

struct Plans {
  AllocationOutcome alloc;
  PilotPlan psop;
  PilotPlan apsp;
};

Plans build_plans(const Scenario& scn, const PowerSpectrum& spectra,
                  const SystemConfig& cfg, uint64_t seed) {
  const Rng root(seed);
  Rng alloc_rng = root.derive(kStreamAlloc);
  auto clusters = kmeans_cluster(scn.beta, cfg.num_clusters, alloc_rng);
  Plans p;
  p.alloc = allocate_apsp(clusters, spectra, cfg, alloc_rng);
  Rng psop_rng = root.derive(kStreamPsop);
  p.psop = rpa_psop(cfg, psop_rng);
  Rng apsp_rng = root.derive(kStreamApsp);
  p.apsp = rpa_apsp(cfg, apsp_rng);
  return p;
}

std::vector<int> draw_active_nonempty(int num_ues, double prob, Rng& rng) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    std::vector<int> active = sample_activity(num_ues, prob, rng);
    if (!active.empty()) return active;
  }
  throw std::runtime_error(
      "experiment: no active UE drawn in 1000 attempts; raise activation_prob");
}

std::string mse_vs_active_job(const SystemConfig& cfg, uint64_t seed, int ka) {
  Scenario scn = build_scenario(cfg, seed);
  PowerSpectrum spectra = build_power_spectrum(scn, cfg);
  Plans p = build_plans(scn, spectra, cfg, seed);
  const uint64_t mc = mix_seed(seed, kStreamMc);
  std::string out;
  double err = 0.0;
  double v = expected_mse_given_ka(p.psop, spectra, cfg, ka, mc, &err);
  append_row(out, seed, ka, "psop-rpa", v, err);
  v = expected_mse_given_ka(p.apsp, spectra, cfg, ka, mc, &err);
  append_row(out, seed, ka, "apsp-rpa", v, err);
  v = expected_mse_given_ka(p.alloc.plan, spectra, cfg, ka, mc, &err);
  append_row(out, seed, ka, "apsp-alloc", v, err);
  append_row(out, seed, ka, "lower-bound",
             mse_floor(spectra, cfg.num_subcarriers, cfg.normalized_snr(),
                       cfg.pilot_symbols),
             0.0);
  return out;
}

std::string mse_weighted_job(const SystemConfig& cfg, uint64_t seed, double grid) {
  Scenario scn = build_scenario(cfg, seed);
  PowerSpectrum spectra = build_power_spectrum(scn, cfg);
  Plans p = build_plans(scn, spectra, cfg, seed);
  const uint64_t mc = mix_seed(seed, kStreamMc);
  std::string out;
  double err = 0.0;
  double v = expected_mse(p.psop, spectra, cfg, mc, &err);
  append_row(out, seed, grid, "psop-rpa", v, err);
  v = expected_mse(p.apsp, spectra, cfg, mc, &err);
  append_row(out, seed, grid, "apsp-rpa", v, err);
  v = expected_mse(p.alloc.plan, spectra, cfg, mc, &err);
  append_row(out, seed, grid, "apsp-alloc", v, err);
  append_row(out, seed, grid, "lower-bound", mse_lower_bound(spectra, cfg), 0.0);
  return out;
}

std::string se_cdf_job(const ExperimentSpec& spec, const SystemConfig& cfg,
                       uint64_t seed) {
  Scenario scn = build_scenario(cfg, seed);
  PowerSpectrum spectra = build_power_spectrum(scn, cfg);
  const Rng root(seed);
  Rng alloc_rng = root.derive(kStreamAlloc);
  auto clusters = kmeans_cluster(scn.beta, cfg.num_clusters, alloc_rng);
  AllocationOutcome alloc = allocate_apsp(clusters, spectra, cfg, alloc_rng);
  Rng act_rng = root.derive(kStreamActivity);
  std::vector<int> active =
      draw_active_nonempty(cfg.num_ues, cfg.activation_prob, act_rng);

  LinkStatistics stats =
      estimate_link_statistics(scn, spectra, alloc.plan, active, spec.subcarrier,
                               cfg.mc_samples, mix_seed(seed, kStreamLink));
  const Vector ones = Vector::Ones(stats.num_active());
  const Vector lb = se_lb(ones, stats, cfg);
  std::string out;
  for (int j = 0; j < stats.num_active(); ++j)
    append_row(out, seed, active[j], "se-lb", lb(j), 0.0);
  if (spec.genie) {
    const Vector genie =
        se_genie(ones, scn, spectra, alloc.plan, active, spec.subcarrier,
                 cfg.mc_samples, mix_seed(seed, kStreamLink), cfg);
    for (int j = 0; j < stats.num_active(); ++j)
      append_row(out, seed, active[j], "se-genie", genie(j), 0.0);
  }
  return out;
}

std::string power_control_job(const ExperimentSpec& spec, const SystemConfig& cfg,
                              uint64_t seed) {
  Scenario scn = build_scenario(cfg, seed);
  PowerSpectrum spectra = build_power_spectrum(scn, cfg);
  const Rng root(seed);
  Rng alloc_rng = root.derive(kStreamAlloc);
  auto clusters = kmeans_cluster(scn.beta, cfg.num_clusters, alloc_rng);
  AllocationOutcome alloc = allocate_apsp(clusters, spectra, cfg, alloc_rng);
  Rng act_rng = root.derive(kStreamActivity);
  std::vector<int> active =
      draw_active_nonempty(cfg.num_ues, cfg.activation_prob, act_rng);

  LinkStatistics stats =
      estimate_link_statistics(scn, spectra, alloc.plan, active, spec.subcarrier,
                               cfg.mc_samples, mix_seed(seed, kStreamLink));
  const double eps = spec.epsilon > 0.0 ? spec.epsilon : cfg.dinkelbach_tol;
  PowerSolution sol = dinkelbach(stats, eps, spec.max_iters);
  const Vector ones = Vector::Ones(stats.num_active());
  const double grid = spec.subcarrier;

  std::string out;
  append_row(out, seed, grid, "min-se-lb-unit", se_lb(ones, stats, cfg).minCoeff(),
             0.0);
  append_row(out, seed, grid, "min-se-lb-opt", se_lb(sol.eta, stats, cfg).minCoeff(),
             0.0);
  append_row(out, seed, grid, "t-star", sol.t_star, 0.0);
  append_row(out, seed, grid, "w-star", sol.w_star, 0.0);
  append_row(out, seed, grid, "iterations", sol.iterations, 0.0);
  append_row(out, seed, grid, "converged", sol.converged ? 1.0 : 0.0, 0.0);
  if (spec.genie) {
    const uint64_t gseed = mix_seed(seed, kStreamLink);
    const Vector gu = se_genie(ones, scn, spectra, alloc.plan, active,
                               spec.subcarrier, cfg.mc_samples, gseed, cfg);
    const Vector go = se_genie(sol.eta, scn, spectra, alloc.plan, active,
                               spec.subcarrier, cfg.mc_samples, gseed, cfg);
    append_row(out, seed, grid, "min-se-genie-unit", gu.minCoeff(), 0.0);
    append_row(out, seed, grid, "min-se-genie-opt", go.minCoeff(), 0.0);
  }
  return out;
}

std::string detect_job(const ExperimentSpec& spec, const SystemConfig& cfg,
                       uint64_t seed, double boost) {
  Scenario scn = build_scenario(cfg, seed);
  scn.rho_p *= boost;
  PowerSpectrum spectra = build_power_spectrum(scn, cfg);
  const Rng root(seed);
  Rng alloc_rng = root.derive(kStreamAlloc);
  auto clusters = kmeans_cluster(scn.beta, cfg.num_clusters, alloc_rng);
  AllocationOutcome alloc = allocate_apsp(clusters, spectra, cfg, alloc_rng);
  Rng pat_rng = root.derive(kStreamPatterns);
  HoppingPatterns patterns = build_patterns(alloc.plan, cfg.frame_slots, pat_rng);
  Rng act_rng = root.derive(kStreamActivity);
  std::vector<int> active = sample_activity(cfg.num_ues, cfg.activation_prob, act_rng);

  Rng cal_rng = root.derive(kStreamCalibrate);
  const double threshold = calibrate_threshold(
      spectra, scn.serving, patterns, cfg.activation_prob, cfg.num_subcarriers,
      scn.rho_p, cfg.pilot_symbols, cfg.mc_samples, spec.detect_percentile, cal_rng);

  Rng frame_rng = root.derive(kStreamFrame);
  std::vector<SlotObservations> slots;
  slots.reserve(cfg.frame_slots);
  for (int r = 0; r < cfg.frame_slots; ++r) {
    // Every slot sits in its own coherence block: fresh channels per slot.
    ChannelRealization real = sample_realization(spectra, frame_rng);
    slots.push_back(synthesize_slot(spectra, scn.serving, real, patterns, r, active,
                                    cfg.num_subcarriers, scn.rho_p,
                                    cfg.pilot_symbols, frame_rng));
  }
  DetectionReport rep = detect_active(slots, patterns, spectra, scn.serving,
                                      cfg.num_subcarriers, scn.rho_p,
                                      cfg.pilot_symbols, threshold, active);

  const int silent = cfg.num_ues - static_cast<int>(active.size());
  std::string out;
  append_row(out, seed, boost, "active-count", static_cast<double>(active.size()), 0.0);
  append_row(out, seed, boost, "threshold", threshold, 0.0);
  append_row(out, seed, boost, "miss-rate",
             active.empty() ? 0.0 : static_cast<double>(rep.misses) / active.size(),
             0.0);
  append_row(out, seed, boost, "false-alarm-rate",
             silent > 0 ? static_cast<double>(rep.false_alarms) / silent : 0.0, 0.0);
  return out;
}

template <typename Fn>
std::vector<std::string> map_seeds(const std::vector<uint64_t>& seeds, bool parallel,
                                   Fn fn) {
  std::vector<std::string> out(seeds.size());
  if (!parallel || seeds.size() < 2) {
    for (std::size_t i = 0; i < seeds.size(); ++i) out[i] = fn(seeds[i]);
    return out;
  }
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  for (std::size_t start = 0; start < seeds.size(); start += hw) {
    const std::size_t end = std::min(seeds.size(), start + hw);
    std::vector<std::future<std::string>> futs;
    futs.reserve(end - start);
    for (std::size_t i = start; i < end; ++i)
      futs.push_back(std::async(std::launch::async, fn, seeds[i]));
    for (std::size_t i = start; i < end; ++i) out[i] = futs[i - start].get();
  }
  return out;
}

const char* grid_axis_name(const ExperimentSpec& spec) {
  switch (spec.kind) {
    case ExperimentKind::kMseVsActive:
      return "active-count";
    case ExperimentKind::kMseVsSpread:
      return spec.sweep_param == "angle" ? "angle-spread-rad" : "delay-spread-s";
    case ExperimentKind::kMseCdf:
      return "none";
    case ExperimentKind::kSeCdf:
      return "ue";
    case ExperimentKind::kDetect:
      return "pilot-boost";
    case ExperimentKind::kPowerControl:
      return "subcarrier";
  }
  return "none";
}

}  // namespace

const char* experiment_kind_name(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kMseVsActive:
      return "mse-vs-active";
    case ExperimentKind::kMseVsSpread:
      return "mse-vs-spread";
    case ExperimentKind::kMseCdf:
      return "mse-cdf";
    case ExperimentKind::kSeCdf:
      return "se-cdf";
    case ExperimentKind::kDetect:
      return "detect";
    case ExperimentKind::kPowerControl:
      return "power-control";
  }
  return "unknown";
}

void ExperimentSpec::validate() const {
  if (seeds.empty()) throw std::invalid_argument("experiment: seed list is empty");
  std::set<uint64_t> unique_seeds(seeds.begin(), seeds.end());
  if (unique_seeds.size() != seeds.size())
    throw std::invalid_argument("experiment: seeds must be distinct");
  if (grid.empty()) throw std::invalid_argument("experiment: sweep grid is empty");
  if (trials < 0) throw std::invalid_argument("experiment: trials must be >= 0");
  if (max_iters < 1) throw std::invalid_argument("experiment: max_iters must be >= 1");
  if (epsilon < 0.0) throw std::invalid_argument("experiment: epsilon must be >= 0");
  if (subcarrier < 0 || subcarrier >= cfg.num_subcarriers)
    throw std::invalid_argument("experiment: subcarrier out of range");
  if (!(detect_percentile > 0.0) || detect_percentile > 1.0)
    throw std::invalid_argument("experiment: detect percentile must be in (0, 1]");
  switch (kind) {
    case ExperimentKind::kMseVsActive:
      for (double v : grid)
        if (v < 1.0 || v > cfg.num_ues || v != std::floor(v))
          throw std::invalid_argument(
              "experiment: active counts must be integers in [1, K]");
      break;
    case ExperimentKind::kMseVsSpread:
      if (sweep_param != "angle" && sweep_param != "delay")
        throw std::invalid_argument(
            "experiment: sweep parameter must be 'angle' or 'delay'");
      for (double v : grid)
        if (!(v > 0.0))
          throw std::invalid_argument("experiment: spreads must be positive");
      break;
    case ExperimentKind::kDetect:
      for (double v : grid)
        if (!(v > 0.0))
          throw std::invalid_argument("experiment: pilot boosts must be positive");
      break;
    default:
      if (grid.size() != 1)
        throw std::invalid_argument(
            "experiment: this experiment takes a single placeholder grid value");
      break;
  }
}

void run_experiment(const ExperimentSpec& spec, std::ostream& out) {
  spec.validate();
  SystemConfig cfg = spec.cfg;
  if (spec.trials > 0) cfg.mc_samples = spec.trials;
  cfg.validate();

  out << "# cfmimo-results v1\n";
  out << "# kind " << experiment_kind_name(spec.kind) << '\n';
  out << "# grid-axis " << grid_axis_name(spec) << '\n';
  out << "# columns seed grid label value stderr\n";

  for (double grid_value : spec.grid) {
    std::vector<std::string> blocks;
    switch (spec.kind) {
      case ExperimentKind::kMseVsActive: {
        const int ka = static_cast<int>(grid_value);
        blocks = map_seeds(spec.seeds, true, [&cfg, ka](uint64_t seed) {
          return mse_vs_active_job(cfg, seed, ka);
        });
        break;
      }
      case ExperimentKind::kMseVsSpread: {
        SystemConfig point = cfg;
        if (spec.sweep_param == "angle")
          point.angle_spread_rad = grid_value;
        else
          point.delay_spread_s = grid_value;
        point.validate();
        blocks = map_seeds(spec.seeds, true, [&point, grid_value](uint64_t seed) {
          return mse_weighted_job(point, seed, grid_value);
        });
        break;
      }
      case ExperimentKind::kMseCdf:
        blocks = map_seeds(spec.seeds, true, [&cfg, grid_value](uint64_t seed) {
          return mse_weighted_job(cfg, seed, grid_value);
        });
        break;
      case ExperimentKind::kSeCdf:
        // The link pass parallelizes internally; keep seeds sequential.
        blocks = map_seeds(spec.seeds, false, [&spec, &cfg](uint64_t seed) {
          return se_cdf_job(spec, cfg, seed);
        });
        break;
      case ExperimentKind::kPowerControl:
        blocks = map_seeds(spec.seeds, false, [&spec, &cfg](uint64_t seed) {
          return power_control_job(spec, cfg, seed);
        });
        break;
      case ExperimentKind::kDetect:
        blocks = map_seeds(spec.seeds, true, [&spec, &cfg, grid_value](uint64_t seed) {
          return detect_job(spec, cfg, seed, grid_value);
        });
        break;
    }
    for (const std::string& b : blocks) out << b;
    out.flush();  // partial results land after every grid point
  }
}

void run_experiment(const ExperimentSpec& spec) {
  if (spec.out_path.empty() || spec.out_path == "-") {
    run_experiment(spec, std::cout);
    return;
  }
  std::ofstream out(spec.out_path);
  if (!out)
    throw std::runtime_error("experiment: cannot open output file " + spec.out_path);
  run_experiment(spec, out);
  if (!out)
    throw std::runtime_error("experiment: write failed for " + spec.out_path);
}

}  // namespace cfmimo

// SPDX-License-Identifier: Apache-2.0
#include "cfmimo/activity.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace cfmimo {

std::vector<int> sample_activity(int num_ues, double activation_prob, Rng& rng) {
  if (activation_prob < 0.0 || activation_prob > 1.0)
    throw std::invalid_argument("sample_activity: p_a must be a probability");
  std::vector<int> active;
  for (int k = 0; k < num_ues; ++k)
    if (rng.uniform() < activation_prob) active.push_back(k);
  return active;
}

HoppingPatterns build_patterns(const PilotPlan& plan, int frame_slots, Rng& rng) {
  plan.validate();
  if (frame_slots <= 0) throw std::invalid_argument("build_patterns: R must be positive");
  const int num_ues = static_cast<int>(plan.sets.size());

  // Pigeonhole check for the uniform-set case; heterogeneous sets fall back
  // to the retry cap below.
  size_t min_set = plan.sets[0].size();
  size_t max_set = plan.sets[0].size();
  for (const auto& set : plan.sets) {
    min_set = std::min(min_set, set.size());
    max_set = std::max(max_set, set.size());
  }
  if (min_set == max_set &&
      std::pow(static_cast<double>(min_set), frame_slots) < num_ues)
    throw std::invalid_argument(
        "build_patterns: |Y|^R < K, distinct hopping patterns are impossible");

  HoppingPatterns patterns;
  patterns.shifts.resize(num_ues);
  auto draw = [&](int ue) {
    std::vector<int> seq(frame_slots);
    for (int r = 0; r < frame_slots; ++r)
      seq[r] = plan.sets[ue][rng.integer(plan.sets[ue].size())];
    return seq;
  };
  for (int k = 0; k < num_ues; ++k) patterns.shifts[k] = draw(k);

  for (int attempt = 0; attempt < 10000; ++attempt) {
    // Keep the first occupant of each pattern, redraw later duplicates.
    std::map<std::vector<int>, int> owner;
    std::vector<int> duplicates;
    for (int k = 0; k < num_ues; ++k) {
      auto [it, inserted] = owner.emplace(patterns.shifts[k], k);
      if (!inserted) duplicates.push_back(k);
    }
    if (duplicates.empty()) return patterns;
    for (int k : duplicates) patterns.shifts[k] = draw(k);
  }
  throw std::runtime_error("build_patterns: could not reach distinct patterns");
}

SlotObservations synthesize_slot(const PowerSpectrum& spectra,
                                 const std::vector<std::vector<int>>& serving,
                                 const ChannelRealization& real,
                                 const HoppingPatterns& patterns, int slot,
                                 const std::vector<int>& active, int num_subcarriers,
                                 double rho_p, int pilot_symbols, Rng& rng) {
  const int num_ues = spectra.num_ues();
  std::vector<int> shifts(num_ues);
  for (int k = 0; k < num_ues; ++k) shifts[k] = patterns.shifts.at(k).at(slot);

  SlotObservations obs(num_ues);
  for (int k = 0; k < num_ues; ++k) {
    obs[k].reserve(serving[k].size());
    for (int l : serving[k]) {
      CMatrix noise(spectra.num_antennas(), spectra.cp_length());
      for (Eigen::Index i = 0; i < noise.rows(); ++i)
        for (Eigen::Index j = 0; j < noise.cols(); ++j) noise(i, j) = rng.cgaussian();
      obs[k].push_back(decorrelated_observation(k, l, real, shifts, active, spectra,
                                                num_subcarriers, rho_p, pilot_symbols,
                                                noise));
    }
  }
  return obs;
}

Vector detection_statistics(const std::vector<SlotObservations>& slots,
                            const PowerSpectrum& spectra,
                            const std::vector<std::vector<int>>& serving, double rho_p,
                            int pilot_symbols) {
  if (slots.empty()) throw std::invalid_argument("detection_statistics: no slots");
  const int num_ues = spectra.num_ues();
  const double noise_var = 1.0 / (rho_p * pilot_symbols);
  Vector stats = Vector::Zero(num_ues);
  for (int k = 0; k < num_ues; ++k) {
    if (serving[k].empty())
      throw std::invalid_argument("detection_statistics: UE has no serving AP");
    KahanSum energy;
    for (const auto& slot : slots) {
      for (size_t i = 0; i < serving[k].size(); ++i) {
        int l = serving[k][i];
        Matrix weighted_spectrum = spectra.beta(k, l) * spectra.spectrum(k, l);
        Matrix w = weighted_spectrum.cwiseQuotient(
            weighted_spectrum + Matrix::Constant(weighted_spectrum.rows(),
                                                 weighted_spectrum.cols(), noise_var));
        energy.add(w.cwiseProduct(slot.at(k).at(i).cwiseAbs2()).sum());
      }
    }
    stats[k] = energy.value() / (static_cast<double>(slots.size()) * serving[k].size());
  }
  return stats;
}

double refined_statistic(int ue, const std::vector<SlotObservations>& slots,
                         const HoppingPatterns& patterns,
                         const PowerSpectrum& spectra,
                         const std::vector<std::vector<int>>& serving,
                         int num_subcarriers, double rho_p, int pilot_symbols,
                         const std::vector<int>& presumed_active) {
  if (slots.empty()) throw std::invalid_argument("refined_statistic: no slots");
  if (serving.at(ue).empty())
    throw std::invalid_argument("refined_statistic: UE has no serving AP");
  std::vector<int> others;
  for (int k : presumed_active)
    if (k != ue) others.push_back(k);

  const int num_ues = spectra.num_ues();
  KahanSum energy;
  for (size_t r = 0; r < slots.size(); ++r) {
    std::vector<int> shifts(num_ues);
    for (int k = 0; k < num_ues; ++k) shifts[k] = patterns.shifts.at(k).at(r);
    for (size_t i = 0; i < serving[ue].size(); ++i) {
      int l = serving[ue][i];
      // Presumed interference plus noise, in the same normalized units as the
      // decorrelated observation (own channel at unit scale).
      Matrix a = interference_denominator(ue, l, spectra, shifts, others,
                                          num_subcarriers, rho_p, pilot_symbols) /
                 spectra.beta(ue, l);
      const Matrix& own = spectra.spectrum(ue, l);
      Matrix u = own.cwiseQuotient(a.cwiseProduct(own + a));
      energy.add(u.cwiseProduct(slots[r].at(ue).at(i).cwiseAbs2()).sum());
    }
  }
  return energy.value() /
         (static_cast<double>(slots.size()) * serving[ue].size());
}

DetectionReport detect_active(const std::vector<SlotObservations>& slots,
                              const HoppingPatterns& patterns,
                              const PowerSpectrum& spectra,
                              const std::vector<std::vector<int>>& serving,
                              int num_subcarriers, double rho_p, int pilot_symbols,
                              double threshold, const std::vector<int>& true_active) {
  const int num_ues = spectra.num_ues();
  auto refined = [&](int ue, const std::vector<int>& presumed) {
    return refined_statistic(ue, slots, patterns, spectra, serving, num_subcarriers,
                             rho_p, pilot_symbols, presumed);
  };

  // Matching pursuit: admit the strongest UE, fold its spectrum into every
  // remaining UE's interference weights, repeat. A strong UE therefore stops
  // inflating the statistics of UEs whose shifts it overlaps.
  std::vector<int> admitted;
  std::vector<bool> in(num_ues, false);
  for (int round = 0; round < num_ues; ++round) {
    int best = -1;
    double best_value = 0.0;
    for (int k = 0; k < num_ues; ++k) {
      if (in[k]) continue;
      double value = refined(k, admitted);
      if (best < 0 || value > best_value) {
        best = k;
        best_value = value;
      }
    }
    if (best < 0 || best_value < threshold) break;
    admitted.push_back(best);
    in[best] = true;
  }

  // Prune: a UE admitted only on the strength of interference that a
  // later-admitted UE explains drops below the threshold once everyone else
  // is accounted for.
  while (!admitted.empty()) {
    int worst = -1;
    double worst_value = 0.0;
    for (size_t i = 0; i < admitted.size(); ++i) {
      double value = refined(admitted[i], admitted);
      if (worst < 0 || value < worst_value) {
        worst = static_cast<int>(i);
        worst_value = value;
      }
    }
    if (worst_value >= threshold) break;
    in[admitted[worst]] = false;
    admitted.erase(admitted.begin() + worst);
  }
  std::sort(admitted.begin(), admitted.end());

  DetectionReport report;
  report.statistics = Vector::Zero(num_ues);
  for (int k = 0; k < num_ues; ++k) report.statistics[k] = refined(k, admitted);
  report.detected = admitted;
  std::vector<bool> truly(num_ues, false);
  for (int k : true_active) truly.at(k) = true;
  for (int k = 0; k < num_ues; ++k) {
    if (in[k] && !truly[k]) ++report.false_alarms;
    if (!in[k] && truly[k]) ++report.misses;
  }
  return report;
}

double calibrate_threshold(const PowerSpectrum& spectra,
                           const std::vector<std::vector<int>>& serving,
                           const HoppingPatterns& patterns, double activation_prob,
                           int num_subcarriers, double rho_p, int pilot_symbols,
                           int trials, double percentile, Rng& rng) {
  if (trials <= 0) throw std::invalid_argument("calibrate_threshold: trials must be positive");
  if (percentile <= 0.0 || percentile > 1.0)
    throw std::invalid_argument("calibrate_threshold: percentile must lie in (0,1]");
  const int num_slots = patterns.num_slots();
  std::vector<double> silent_stats;
  for (int trial = 0; trial < trials; ++trial) {
    Rng sub = rng.derive(trial);
    std::vector<int> active = sample_activity(spectra.num_ues(), activation_prob, sub);
    std::vector<SlotObservations> slots;
    slots.reserve(num_slots);
    for (int r = 0; r < num_slots; ++r) {
      // Each slot is its own coherence block: fresh fading draw.
      ChannelRealization real = sample_realization(spectra, sub);
      slots.push_back(synthesize_slot(spectra, serving, real, patterns, r, active,
                                      num_subcarriers, rho_p, pilot_symbols, sub));
    }
    std::vector<bool> truly(spectra.num_ues(), false);
    for (int k : active) truly[k] = true;
    for (int k = 0; k < spectra.num_ues(); ++k)
      if (!truly[k])
        silent_stats.push_back(refined_statistic(k, slots, patterns, spectra, serving,
                                                 num_subcarriers, rho_p, pilot_symbols,
                                                 active));
  }
  if (silent_stats.empty())
    throw std::runtime_error("calibrate_threshold: no silent UEs observed; lower p_a");
  std::sort(silent_stats.begin(), silent_stats.end());
  size_t index = static_cast<size_t>(std::ceil(percentile * silent_stats.size())) - 1;
  return silent_stats[std::min(index, silent_stats.size() - 1)];
}

}  // namespace cfmimo

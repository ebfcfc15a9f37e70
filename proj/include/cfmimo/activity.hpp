// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "cfmimo/channel.hpp"
#include "cfmimo/common.hpp"
#include "cfmimo/pilot.hpp"
#include "cfmimo/rng.hpp"

namespace cfmimo {

/// Independent Bernoulli(p_a) activation; returns ascending UE indices.
std::vector<int> sample_activity(int num_ues, double activation_prob, Rng& rng);

/// Per-UE slot shifts: shifts[k][r] is UE k's pilot shift in slot r, drawn
/// from its allocated set.
struct HoppingPatterns {
  std::vector<std::vector<int>> shifts;
  int num_slots() const { return shifts.empty() ? 0 : static_cast<int>(shifts[0].size()); }
};

/// Uniform per-slot draws from each UE's set, rejection-resampled until all
/// K patterns are pairwise distinct. Throws when the pattern space is too
/// small (|Y|^R < K for the common uniform set size).
HoppingPatterns build_patterns(const PilotPlan& plan, int frame_slots, Rng& rng);

/// Hypothesis observations of one slot: obs[k][i] is the decorrelated matrix
/// for UE k at its i-th serving AP (serving-set order), synthesized whether or
/// not k is active.
using SlotObservations = std::vector<std::vector<CMatrix>>;

SlotObservations synthesize_slot(const PowerSpectrum& spectra,
                                 const std::vector<std::vector<int>>& serving,
                                 const ChannelRealization& real,
                                 const HoppingPatterns& patterns, int slot,
                                 const std::vector<int>& active, int num_subcarriers,
                                 double rho_p, int pilot_symbols, Rng& rng);

struct DetectionReport {
  std::vector<int> detected;
  int misses = 0;
  int false_alarms = 0;
  Vector statistics;  // per UE
};

/// Matched-filter energy statistic per UE, averaged over slots and serving
/// APs with weights spectrum_beta / (spectrum_beta + 1/(rho_p Z)).
Vector detection_statistics(const std::vector<SlotObservations>& slots,
                            const PowerSpectrum& spectra,
                            const std::vector<std::vector<int>>& serving, double rho_p,
                            int pilot_symbols);

/// Energy statistic for one UE with the interference of a presumed-active set
/// folded into the weight denominator: per element, Y / (A (Y + A)) where Y
/// is the UE's normalized spectrum and A the presumed interference-plus-noise
/// spectrum in the same units. Silent UEs score at most ~N*N_cp on average no
/// matter how strong the (accounted-for) interference is; active UEs scale
/// like the per-element SNR.
double refined_statistic(int ue, const std::vector<SlotObservations>& slots,
                         const HoppingPatterns& patterns,
                         const PowerSpectrum& spectra,
                         const std::vector<std::vector<int>>& serving,
                         int num_subcarriers, double rho_p, int pilot_symbols,
                         const std::vector<int>& presumed_active);

/// Greedy matching-pursuit declaration: repeatedly admit the UE with the
/// largest refined statistic given the set admitted so far, stop below
/// `threshold`, then prune admitted UEs whose leave-one-out refined statistic
/// falls back below it. `statistics` reports the final leave-one-out values.
DetectionReport detect_active(const std::vector<SlotObservations>& slots,
                              const HoppingPatterns& patterns,
                              const PowerSpectrum& spectra,
                              const std::vector<std::vector<int>>& serving,
                              int num_subcarriers, double rho_p, int pilot_symbols,
                              double threshold, const std::vector<int>& true_active);

/// Empirical `percentile` (0,1] of the silent-UE refined statistic (computed
/// against the true active set of each trial) over `trials` fresh
/// activity/channel draws. The default operating point takes the 99th
/// percentile; high-SNR experiments can push it to 1.0 (the observed max)
/// with a safety factor on top.
double calibrate_threshold(const PowerSpectrum& spectra,
                           const std::vector<std::vector<int>>& serving,
                           const HoppingPatterns& patterns, double activation_prob,
                           int num_subcarriers, double rho_p, int pilot_symbols,
                           int trials, double percentile, Rng& rng);

}  // namespace cfmimo

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "cfmimo/channel.hpp"
#include "cfmimo/common.hpp"
#include "cfmimo/config.hpp"
#include "cfmimo/pilot.hpp"
#include "cfmimo/scenario.hpp"

namespace cfmimo {

/// Monte-Carlo moments of the uplink after masked per-AP-normalized MRC,
/// evaluated at one subcarrier. All vectors and matrices are indexed by
/// position in `active`, not by global UE id.
struct LinkStatistics {
  std::vector<int> active;
  int subcarrier = 0;
  int trials = 0;
  double rho_u = 0.0;
  uint64_t key = 0;  // binds (scenario seed, plan, active set, s, trials, seed)

  Vector coh;       // |E{c_k^H g_k}|^2
  Matrix cross;     // E{|c_k^H g_k'|^2}; row: combiner owner, column: source
  Vector cnorm;     // E{||c_k||^2}
  Vector coh_se;    // delta-method standard error of coh
  Matrix cross_se;  // standard errors of the cross moments
  Vector cnorm_se;
  long zero_combiner_blocks = 0;  // (UE, AP) estimates that came back all-zero

  int num_active() const { return static_cast<int>(active.size()); }
};

/// Per-AP normalized MRC: c = ghat / ||ghat||^2. A zero estimate yields a zero
/// combiner (that AP contributes nothing); callers count those events.
CVector mrc_combiner(const CVector& ghat);

/// Cache key for one statistics run.
uint64_t link_cache_key(uint64_t scenario_seed, uint64_t plan_key,
                        const std::vector<int>& active, int subcarrier, int trials,
                        uint64_t seed);

/// Estimate coh/cross/cnorm by Monte Carlo. Each trial draws per-UE shifts
/// from the plan sets, a fresh channel realization, decorrelated pilot
/// observations, MMSE estimates, and the masked combiner, then accumulates the
/// three expectation families. Trials are grouped into fixed-size chunks that
/// may run on worker threads; chunk results are merged in index order, so the
/// output depends only on the inputs and `seed`. Requires trials >= 500.
LinkStatistics estimate_link_statistics(const Scenario& scn,
                                        const PowerSpectrum& spectra,
                                        const PilotPlan& plan,
                                        const std::vector<int>& active,
                                        int subcarrier, int trials, uint64_t seed);

/// SINR_k = eta_k coh_k / (sum_k' eta_k' cross_{k,k'} - eta_k coh_k
///          + cnorm_k / rho_u). eta must lie in [0,1]; the denominator is
/// positive by construction (empirical cross_{k,k} >= coh_k) and asserted.
Vector sinr_lb(const Vector& eta, const LinkStatistics& stats);

/// SE lower bound: prelog * log2(1 + SINR_k).
Vector se_lb(const Vector& eta, const LinkStatistics& stats, const SystemConfig& cfg);

/// Spectral efficiency conditioned on the channel estimates: per trial, the
/// instantaneous SINR built from the other UEs' estimated channels plus every
/// active UE's estimation-error covariance, with the log2 terms averaged over
/// trials and scaled by the prelog. Reuses the per-trial RNG streams of
/// estimate_link_statistics, so comparisons at equal (seed, trials) are
/// paired. Requires trials >= 200.
Vector se_genie(const Vector& eta, const Scenario& scn, const PowerSpectrum& spectra,
                const PilotPlan& plan, const std::vector<int>& active, int subcarrier,
                int trials, uint64_t seed, const SystemConfig& cfg);

/// Plain-text round trip; load_stats throws std::runtime_error on bad input.
void save_stats(std::ostream& out, const LinkStatistics& stats);
LinkStatistics load_stats(std::istream& in);

/// Load `path` when it holds statistics matching the expected key, otherwise
/// compute and (best effort) save. An empty path always computes.
LinkStatistics cached_link_statistics(const std::string& path, const Scenario& scn,
                                      const PowerSpectrum& spectra,
                                      const PilotPlan& plan,
                                      const std::vector<int>& active, int subcarrier,
                                      int trials, uint64_t seed);

}  // namespace cfmimo

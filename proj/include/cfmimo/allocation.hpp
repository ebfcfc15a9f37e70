// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "cfmimo/channel.hpp"
#include "cfmimo/common.hpp"
#include "cfmimo/config.hpp"
#include "cfmimo/pilot.hpp"
#include "cfmimo/rng.hpp"

namespace cfmimo {

/// Normalized inner product |sum(A.*B)| / (||A||_F ||B||_F); defined as 0
/// when either argument is identically zero.
double overlap_coefficient(const Matrix& a, const Matrix& b);

/// Cluster UEs by large-scale-gain similarity: assignment maximizes the
/// overlap coefficient against centroids, centroids are cluster means,
/// repair reseeds empty clusters from the worst-matched UE. At most 100
/// rounds. Returns cluster membership lists (UE indices ascending).
std::vector<std::vector<int>> kmeans_cluster(const Matrix& beta, int num_clusters,
                                             Rng& rng);

struct AllocationOutcome {
  PilotPlan plan;
  std::vector<std::vector<int>> clusters;
  /// Achieved expected MSE; NaN until evaluate_expected_mse fills it.
  double expected_mse = std::numeric_limits<double>::quiet_NaN();
  /// True when every same-group pair of allocated shifts leaves the shifted
  /// interferer spectrum exactly disjoint from the victim's masked support,
  /// which makes the interference-free lower bound tight.
  bool optimal = false;
};

/// Greedy per-cluster APSP set allocation. The first UE of each cluster draws
/// random shifts; every later UE scans the universe in ascending order and
/// keeps shifts whose averaged worst-case interference overlap stays within
/// cfg.overlap_threshold, falling back to the smallest-overlap shifts when
/// fewer than |Y| qualify.
AllocationOutcome allocate_apsp(const std::vector<std::vector<int>>& clusters,
                                const PowerSpectrum& spectra, const SystemConfig& cfg,
                                Rng& rng);

/// Orthogonal-pilot baseline: every UE draws one shift whose delay offset is a
/// multiple of N_cp (singleton sets). Universe size Z * floor(N_c/N_cp).
PilotPlan rpa_psop(const SystemConfig& cfg, Rng& rng);
/// Unconstrained baseline: every UE draws one shift uniformly from the full
/// universe (singleton sets).
PilotPlan rpa_apsp(const SystemConfig& cfg, Rng& rng);
/// The PSOP shift universe itself, ascending.
std::vector<int> psop_universe(int num_subcarriers, int cp_length, int pilot_symbols);

/// Serving-AP-and-subcarrier averaged estimation error of one UE for a given
/// active set and shift assignment (masked numerator spectra, unmasked
/// interferers, own term included in the denominator sum).
double averaged_mse_ue(int ue, const PowerSpectrum& spectra,
                       const std::vector<int>& shifts, const std::vector<int>& active,
                       int num_subcarriers, double rho_p, int pilot_symbols);
/// Mean of averaged_mse_ue over the active set.
double averaged_mse(const PowerSpectrum& spectra, const std::vector<int>& shifts,
                    const std::vector<int>& active, int num_subcarriers, double rho_p,
                    int pilot_symbols);

/// Expectation of averaged_mse over Bernoulli(p_a) activity, uniform active
/// subsets and uniform per-UE shift draws from the plan sets. Enumerates
/// exactly when prod_k (1+|Y_k|) <= 10^4, otherwise Monte-Carlo with
/// cfg.mc_samples trials (empty draws contribute zero, matching the K_a >= 1
/// sum of the analysis).
double expected_mse(const PilotPlan& plan, const PowerSpectrum& spectra,
                    const SystemConfig& cfg, uint64_t seed,
                    double* std_error = nullptr);

/// Same expectation conditioned on exactly `num_active` UEs (uniform subsets).
double expected_mse_given_ka(const PilotPlan& plan, const PowerSpectrum& spectra,
                             const SystemConfig& cfg, int num_active, uint64_t seed,
                             double* std_error = nullptr);

/// Interference-free per-UE floor averaged over the population: the value
/// every allocation is bounded below by, before activity weighting.
double mse_floor(const PowerSpectrum& spectra, int num_subcarriers, double rho_p,
                 int pilot_symbols);
/// Activity-weighted floor: sum over K_a = 1..K of the binomial weight times
/// mse_floor, as the analysis prints it.
double mse_lower_bound(const PowerSpectrum& spectra, const SystemConfig& cfg);

}  // namespace cfmimo

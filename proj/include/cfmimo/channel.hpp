// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "cfmimo/common.hpp"
#include "cfmimo/config.hpp"
#include "cfmimo/rng.hpp"
#include "cfmimo/scenario.hpp"

namespace cfmimo {

/// Laplacian-shaped angular power profile exp(-sqrt(2)|theta - mean|/spread),
/// unnormalized. theta in [-pi/2, pi/2].
double angle_power_profile(double theta, double mean_aoa, double angle_spread);

/// Exponential delay power profile exp(-tau/spread), unnormalized.
/// tau must lie in [0, (cp_length-1) * T_s].
double delay_power_profile(double tau, double delay_spread, double max_tau);

/// Angular grid edges theta_n = arcsin(2n/N - 1), n = 0..N.
Vector angle_grid(int num_antennas);

/// The two fixed grid transforms: v (N x N) maps angle to antenna domain,
/// f (N_c x N_cp) maps delay to subcarrier domain. v is exactly unitary on
/// the arcsin grid; f has orthonormal columns.
struct TransformPair {
  CMatrix v;
  CMatrix f;
  static TransformPair build(int num_antennas, int num_subcarriers, int cp_length);
};

/// Per-link angle-delay channel power spectra. spectrum(k,l) is the
/// normalized N x N_cp matrix with entries summing to N*N_cp; large-scale
/// gain and serving masks are carried alongside so the beta-weighted and
/// masked stacked forms (M x N_cp, AP blocks in index order) can be built.
class PowerSpectrum {
 public:
  PowerSpectrum(std::vector<std::vector<Matrix>> spectra, Matrix beta, Matrix mask);

  int num_ues() const { return static_cast<int>(spectra_.size()); }
  int num_aps() const { return static_cast<int>(spectra_[0].size()); }
  int num_antennas() const { return static_cast<int>(spectra_[0][0].rows()); }
  int cp_length() const { return static_cast<int>(spectra_[0][0].cols()); }
  int total_antennas() const { return num_antennas() * num_aps(); }

  const Matrix& spectrum(int ue, int ap) const { return spectra_[ue][ap]; }
  double beta(int ue, int ap) const { return beta_(ue, ap); }
  double mask(int ue, int ap) const { return mask_(ue, ap); }

  Matrix stacked(int ue) const;              // Upsilon_k
  Matrix stacked_beta(int ue) const;         // beta-weighted
  Matrix stacked_masked(int ue) const;       // serving-AP rows only
  Matrix stacked_masked_beta(int ue) const;  // both

 private:
  std::vector<std::vector<Matrix>> spectra_;
  Matrix beta_;
  Matrix mask_;
};

/// Discretize the separable angle-delay profile onto the grid: entry (n,q) is
/// proportional to (theta_{n+1}-theta_n) * PAS(theta_n) * PDS(q*T_s), with
/// delay support clipped to cfg.effective_taps() bins, then scaled so each
/// (k,l) spectrum sums to exactly N*N_cp.
PowerSpectrum build_power_spectrum(const Scenario& scn, const SystemConfig& cfg);

/// One draw of the beta-weighted angle-delay channels: independent complex
/// Gaussians with variances beta(k,l) * spectrum(k,l).
struct ChannelRealization {
  std::vector<std::vector<CMatrix>> h;  // [ue][ap], N x N_cp
};
ChannelRealization sample_realization(const PowerSpectrum& spectra, Rng& rng);
/// Single-link draw used by per-trial loops that do not need every UE.
CMatrix sample_link(const Matrix& variance, Rng& rng);

/// Space-frequency response of one AP link: v * h * f^T (N x N_c).
CMatrix to_space_frequency(const CMatrix& h, const TransformPair& t);
/// Inverse map: v^H * g * conj(f) recovers the angle-delay matrix.
CMatrix from_space_frequency(const CMatrix& g, const TransformPair& t);
/// Column s of the space-frequency response, avoiding the full N_c matrix.
CVector space_frequency_column(const CMatrix& h, const TransformPair& t, int subcarrier);

/// Full space-frequency covariance (F kron V) diag(vec spectrum) (F kron V)^H
/// of one UE's stacked channel. Validation-scale only: refuses M*N_c > 4096.
CMatrix covariance_from_spectrum(const Matrix& stacked_spectrum, int num_antennas,
                                 int num_subcarriers);

}  // namespace cfmimo

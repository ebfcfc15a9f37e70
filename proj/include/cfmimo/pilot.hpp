// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "cfmimo/channel.hpp"
#include "cfmimo/common.hpp"
#include "cfmimo/rng.hpp"

namespace cfmimo {

/// A shift phi in [0, N_c*Z) encodes a symbol-domain group <phi>_Z and a
/// delay-domain offset floor(phi/Z).
int shift_group(int shift, int pilot_symbols);
int delay_offset(int shift, int pilot_symbols);
int wrap_index(int x, int modulus);  // x mod m mapped into [0, m)

/// Per-UE shift sets Y_k plus the universe dimensions they index into.
struct PilotPlan {
  int num_subcarriers = 0;
  int pilot_symbols = 1;
  std::vector<std::vector<int>> sets;

  int universe_size() const { return num_subcarriers * pilot_symbols; }
  void validate() const;  // throws when a shift leaves the universe or a set is empty
};

/// FNV-1a over dimensions and sets; used to key cached link statistics.
uint64_t plan_hash(const PilotPlan& plan);

/// "ue <shift list>" lines, reloadable.
void save_plan(std::ostream& out, const PilotPlan& plan);
PilotPlan load_plan(std::istream& in);

/// Explicit pilot matrix of one shift: row <phi>_Z of the Z-point unitary DFT,
/// Kronecker a diagonal phase ramp of rate floor(phi/Z) (base sequence is the
/// identity). Shape N_c x N_c*Z. Validation scale only: refuses N_c*Z > 4096.
CMatrix build_pilot_matrix(int shift, int num_subcarriers, int pilot_symbols);

/// Delay-domain cyclic shift: embed the N_cp columns into N_c, rotate right by
/// d (mod N_c), truncate back to N_cp columns. Applies to spectra and to
/// realization matrices with the same index map.
Matrix shift_spectrum(const Matrix& spectrum, int d, int num_subcarriers);
CMatrix shift_realization(const CMatrix& h, int d, int num_subcarriers);

/// Interference-plus-noise variance profile seen by (ue, ap) after
/// decorrelation: sum over active UEs with matching group of their shifted
/// beta-weighted spectra, plus 1/(rho_p * Z). The ue's own term is included.
Matrix interference_denominator(int ue, int ap, const PowerSpectrum& spectra,
                                const std::vector<int>& shifts,
                                const std::vector<int>& active, int num_subcarriers,
                                double rho_p, int pilot_symbols);

/// Decorrelated observation of hypothesis "ue transmitted with shifts[ue]" at
/// one AP, synthesized directly in the angle-delay domain. `noise` is a unit-
/// variance N x N_cp matrix; scaling by 1/sqrt(rho_p*Z*beta) happens here.
/// Valid whether or not ue is active (silent hypothesis has no own-signal
/// term), which is what activity detection tests against.
CMatrix decorrelated_observation(int ue, int ap, const ChannelRealization& real,
                                 const std::vector<int>& shifts,
                                 const std::vector<int>& active,
                                 const PowerSpectrum& spectra, int num_subcarriers,
                                 double rho_p, int pilot_symbols, const CMatrix& noise);

/// Same, drawing the noise from rng. Enforces the estimation contract:
/// ue must be active and ap must serve it.
CMatrix synthesize_decorrelated(int ue, int ap, const ChannelRealization& real,
                                const std::vector<int>& shifts,
                                const std::vector<int>& active,
                                const PowerSpectrum& spectra, int num_subcarriers,
                                double rho_p, int pilot_symbols, Rng& rng);

/// Element-wise MMSE filter for the normalized channel of (ue, ap).
Matrix mmse_gain(int ue, int ap, const PowerSpectrum& spectra,
                 const std::vector<int>& shifts, const std::vector<int>& active,
                 int num_subcarriers, double rho_p, int pilot_symbols);
inline CMatrix mmse_estimate(const CMatrix& observation, const Matrix& gain) {
  return gain.cast<Complex>().cwiseProduct(observation);
}

/// Closed-form per-element estimation error variance of the normalized
/// channel estimate at (ue, ap).
Matrix mmse_error_spectrum(int ue, int ap, const PowerSpectrum& spectra,
                           const std::vector<int>& shifts,
                           const std::vector<int>& active, int num_subcarriers,
                           double rho_p, int pilot_symbols);

}  // namespace cfmimo

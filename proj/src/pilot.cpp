// SPDX-License-Identifier: Apache-2.0
#include "cfmimo/pilot.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace cfmimo {

int shift_group(int shift, int pilot_symbols) {
  if (pilot_symbols <= 0) throw std::invalid_argument("shift_group: Z must be positive");
  return wrap_index(shift, pilot_symbols);
}

int delay_offset(int shift, int pilot_symbols) {
  if (pilot_symbols <= 0) throw std::invalid_argument("delay_offset: Z must be positive");
  if (shift < 0) throw std::invalid_argument("delay_offset: shift must be nonnegative");
  return shift / pilot_symbols;
}

int wrap_index(int x, int modulus) {
  int r = x % modulus;
  return r < 0 ? r + modulus : r;
}

void PilotPlan::validate() const {
  if (num_subcarriers <= 0 || pilot_symbols <= 0)
    throw std::invalid_argument("PilotPlan: bad dimensions");
  for (size_t k = 0; k < sets.size(); ++k) {
    if (sets[k].empty())
      throw std::invalid_argument("PilotPlan: UE " + std::to_string(k) + " has no shifts");
    for (int s : sets[k])
      if (s < 0 || s >= universe_size())
        throw std::invalid_argument("PilotPlan: UE " + std::to_string(k) +
                                    " shift outside universe");
  }
}

uint64_t plan_hash(const PilotPlan& plan) {
  uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](uint64_t x) {
    for (int b = 0; b < 8; ++b) {
      h ^= (x >> (8 * b)) & 0xff;
      h *= 1099511628211ULL;
    }
  };
  mix(static_cast<uint64_t>(plan.num_subcarriers));
  mix(static_cast<uint64_t>(plan.pilot_symbols));
  for (const auto& set : plan.sets) {
    mix(set.size());
    for (int s : set) mix(static_cast<uint64_t>(s));
  }
  return h;
}

void save_plan(std::ostream& out, const PilotPlan& plan) {
  out << "# pilot plan v1\n";
  out << "dims " << plan.num_subcarriers << " " << plan.pilot_symbols << "\n";
  for (size_t k = 0; k < plan.sets.size(); ++k) {
    out << k;
    for (int s : plan.sets[k]) out << " " << s;
    out << "\n";
  }
}

PilotPlan load_plan(std::istream& in) {
  PilotPlan plan;
  std::string line;
  bool have_dims = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    std::string first;
    row >> first;
    if (first == "dims") {
      if (!(row >> plan.num_subcarriers >> plan.pilot_symbols))
        throw std::runtime_error("pilot plan: malformed dims line");
      have_dims = true;
      continue;
    }
    size_t ue = 0;
    try {
      ue = std::stoul(first);
    } catch (const std::exception&) {
      throw std::runtime_error("pilot plan: malformed UE row");
    }
    if (ue != plan.sets.size())
      throw std::runtime_error("pilot plan: UE rows out of order");
    std::vector<int> set;
    int s;
    while (row >> s) set.push_back(s);
    plan.sets.push_back(std::move(set));
  }
  if (!have_dims) throw std::runtime_error("pilot plan: missing dims line");
  plan.validate();
  return plan;
}

CMatrix build_pilot_matrix(int shift, int num_subcarriers, int pilot_symbols) {
  const int nc = num_subcarriers;
  const int z = pilot_symbols;
  if (shift < 0 || shift >= nc * z)
    throw std::invalid_argument("build_pilot_matrix: shift outside universe");
  if (static_cast<long>(nc) * z > 4096)
    throw std::invalid_argument("build_pilot_matrix: N_c*Z > 4096; validation scale only");
  const int group = shift_group(shift, z);
  const int offset = delay_offset(shift, z);

  // Row `group` of the unitary Z-point DFT.
  CVector dft_row(z);
  for (int i = 0; i < z; ++i) {
    double phase = -2.0 * kPi * static_cast<double>(group) * i / z;
    dft_row[i] = Complex(std::cos(phase), std::sin(phase)) / std::sqrt(static_cast<double>(z));
  }
  // Diagonal phase ramp at rate `offset` applied to the identity base sequence.
  CVector ramp(nc);
  for (int m = 0; m < nc; ++m) {
    double phase = -2.0 * kPi * static_cast<double>(m) * offset / nc;
    ramp[m] = Complex(std::cos(phase), std::sin(phase));
  }

  CMatrix pilot(nc, nc * z);
  for (int i = 0; i < z; ++i)
    pilot.middleCols(i * nc, nc) = (dft_row[i] * ramp).asDiagonal();
  return pilot;
}

namespace {

template <class Mat>
Mat shift_columns(const Mat& in, int d, int num_subcarriers) {
  const int cp = static_cast<int>(in.cols());
  if (cp > num_subcarriers)
    throw std::invalid_argument("shift: N_cp exceeds N_c");
  Mat out = Mat::Zero(in.rows(), cp);
  for (int q = 0; q < cp; ++q) {
    int src = wrap_index(q - d, num_subcarriers);
    if (src < cp) out.col(q) = in.col(src);
  }
  return out;
}

}  // namespace

Matrix shift_spectrum(const Matrix& spectrum, int d, int num_subcarriers) {
  return shift_columns(spectrum, d, num_subcarriers);
}

CMatrix shift_realization(const CMatrix& h, int d, int num_subcarriers) {
  return shift_columns(h, d, num_subcarriers);
}

Matrix interference_denominator(int ue, int ap, const PowerSpectrum& spectra,
                                const std::vector<int>& shifts,
                                const std::vector<int>& active, int num_subcarriers,
                                double rho_p, int pilot_symbols) {
  if (!(rho_p > 0.0))
    throw std::invalid_argument("interference_denominator: rho_p must be positive");
  const int own_group = shift_group(shifts.at(ue), pilot_symbols);
  const int own_offset = delay_offset(shifts.at(ue), pilot_symbols);
  Matrix denom = Matrix::Constant(spectra.num_antennas(), spectra.cp_length(),
                                  1.0 / (rho_p * pilot_symbols));
  for (int other : active) {
    if (shift_group(shifts.at(other), pilot_symbols) != own_group) continue;
    int d = delay_offset(shifts.at(other), pilot_symbols) - own_offset;
    denom += shift_spectrum(spectra.beta(other, ap) * spectra.spectrum(other, ap), d,
                            num_subcarriers);
  }
  return denom;
}

CMatrix decorrelated_observation(int ue, int ap, const ChannelRealization& real,
                                 const std::vector<int>& shifts,
                                 const std::vector<int>& active,
                                 const PowerSpectrum& spectra, int num_subcarriers,
                                 double rho_p, int pilot_symbols, const CMatrix& noise) {
  const double beta = spectra.beta(ue, ap);
  if (!(beta > 0.0))
    throw std::invalid_argument("decorrelated_observation: beta must be positive");
  const int own_group = shift_group(shifts.at(ue), pilot_symbols);
  const int own_offset = delay_offset(shifts.at(ue), pilot_symbols);
  const double inv_sqrt_beta = 1.0 / std::sqrt(beta);

  CMatrix obs = noise / std::sqrt(rho_p * pilot_symbols * beta);
  for (int other : active) {
    if (shift_group(shifts.at(other), pilot_symbols) != own_group) continue;
    int d = delay_offset(shifts.at(other), pilot_symbols) - own_offset;
    // For other == ue this reduces to the unshifted own channel / sqrt(beta),
    // i.e. the normalized desired term of the decorrelated model.
    obs += inv_sqrt_beta * shift_realization(real.h.at(other).at(ap), d, num_subcarriers);
  }
  return obs;
}

CMatrix synthesize_decorrelated(int ue, int ap, const ChannelRealization& real,
                                const std::vector<int>& shifts,
                                const std::vector<int>& active,
                                const PowerSpectrum& spectra, int num_subcarriers,
                                double rho_p, int pilot_symbols, Rng& rng) {
  bool is_active = false;
  for (int a : active) is_active |= (a == ue);
  if (!is_active)
    throw std::invalid_argument("synthesize_decorrelated: UE is not active");
  if (spectra.mask(ue, ap) == 0.0)
    throw std::invalid_argument("synthesize_decorrelated: AP does not serve this UE");
  CMatrix noise(spectra.num_antennas(), spectra.cp_length());
  for (Eigen::Index i = 0; i < noise.rows(); ++i)
    for (Eigen::Index j = 0; j < noise.cols(); ++j) noise(i, j) = rng.cgaussian();
  return decorrelated_observation(ue, ap, real, shifts, active, spectra, num_subcarriers,
                                  rho_p, pilot_symbols, noise);
}

Matrix mmse_gain(int ue, int ap, const PowerSpectrum& spectra,
                 const std::vector<int>& shifts, const std::vector<int>& active,
                 int num_subcarriers, double rho_p, int pilot_symbols) {
  Matrix denom = interference_denominator(ue, ap, spectra, shifts, active,
                                          num_subcarriers, rho_p, pilot_symbols);
  return (spectra.beta(ue, ap) * spectra.spectrum(ue, ap)).cwiseQuotient(denom);
}

Matrix mmse_error_spectrum(int ue, int ap, const PowerSpectrum& spectra,
                           const std::vector<int>& shifts,
                           const std::vector<int>& active, int num_subcarriers,
                           double rho_p, int pilot_symbols) {
  Matrix gain = mmse_gain(ue, ap, spectra, shifts, active, num_subcarriers, rho_p,
                          pilot_symbols);
  const Matrix& own = spectra.spectrum(ue, ap);
  return own - own.cwiseProduct(gain);
}

}  // namespace cfmimo

// SPDX-License-Identifier: Apache-2.0
#include "cfmimo/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace cfmimo {

double angle_power_profile(double theta, double mean_aoa, double angle_spread) {
  if (angle_spread <= 0.0)
    throw std::invalid_argument("angle_power_profile: spread must be positive");
  return std::exp(-std::sqrt(2.0) * std::abs(theta - mean_aoa) / angle_spread);
}

double delay_power_profile(double tau, double delay_spread, double max_tau) {
  if (delay_spread <= 0.0)
    throw std::invalid_argument("delay_power_profile: spread must be positive");
  if (tau < 0.0 || tau > max_tau)
    throw std::invalid_argument("delay_power_profile: tau outside [0, (N_cp-1)*T_s]");
  return std::exp(-tau / delay_spread);
}

Vector angle_grid(int num_antennas) {
  if (num_antennas <= 0) throw std::invalid_argument("angle_grid: N must be positive");
  Vector grid(num_antennas + 1);
  for (int n = 0; n <= num_antennas; ++n)
    grid[n] = std::asin(2.0 * n / num_antennas - 1.0);
  return grid;
}

TransformPair TransformPair::build(int num_antennas, int num_subcarriers, int cp_length) {
  if (num_antennas <= 0 || num_subcarriers <= 0 || cp_length <= 0 ||
      cp_length > num_subcarriers)
    throw std::invalid_argument("TransformPair: bad dimensions");
  TransformPair t;
  t.v.resize(num_antennas, num_antennas);
  double scale_v = 1.0 / std::sqrt(static_cast<double>(num_antennas));
  for (int i = 0; i < num_antennas; ++i) {
    for (int j = 0; j < num_antennas; ++j) {
      // sin(theta_j) = 2j/N - 1 on the arcsin grid, no trig needed
      double phase = -kPi * i * (2.0 * j / num_antennas - 1.0);
      t.v(i, j) = scale_v * Complex(std::cos(phase), std::sin(phase));
    }
  }
  t.f.resize(num_subcarriers, cp_length);
  double scale_f = 1.0 / std::sqrt(static_cast<double>(num_subcarriers));
  for (int s = 0; s < num_subcarriers; ++s) {
    for (int q = 0; q < cp_length; ++q) {
      double phase = -2.0 * kPi * static_cast<double>(s) * q / num_subcarriers;
      t.f(s, q) = scale_f * Complex(std::cos(phase), std::sin(phase));
    }
  }
  return t;
}

PowerSpectrum::PowerSpectrum(std::vector<std::vector<Matrix>> spectra, Matrix beta,
                             Matrix mask)
    : spectra_(std::move(spectra)), beta_(std::move(beta)), mask_(std::move(mask)) {
  if (spectra_.empty() || spectra_[0].empty())
    throw std::invalid_argument("PowerSpectrum: empty spectra");
  if (beta_.rows() != static_cast<Eigen::Index>(spectra_.size()) ||
      beta_.cols() != static_cast<Eigen::Index>(spectra_[0].size()) ||
      beta_.rows() != mask_.rows() || beta_.cols() != mask_.cols())
    throw std::invalid_argument("PowerSpectrum: inconsistent dimensions");
}

namespace {

Matrix stack_links(const PowerSpectrum& ps, int ue, bool weight_beta, bool apply_mask) {
  int n = ps.num_antennas();
  Matrix out(ps.total_antennas(), ps.cp_length());
  for (int l = 0; l < ps.num_aps(); ++l) {
    double w = weight_beta ? ps.beta(ue, l) : 1.0;
    if (apply_mask) w *= ps.mask(ue, l);
    out.middleRows(l * n, n) = w * ps.spectrum(ue, l);
  }
  return out;
}

}  // namespace

Matrix PowerSpectrum::stacked(int ue) const { return stack_links(*this, ue, false, false); }
Matrix PowerSpectrum::stacked_beta(int ue) const { return stack_links(*this, ue, true, false); }
Matrix PowerSpectrum::stacked_masked(int ue) const { return stack_links(*this, ue, false, true); }
Matrix PowerSpectrum::stacked_masked_beta(int ue) const { return stack_links(*this, ue, true, true); }

PowerSpectrum build_power_spectrum(const Scenario& scn, const SystemConfig& cfg) {
  const int num_antennas = cfg.antennas_per_ula;
  const int cp = cfg.cp_length;
  const int taps = cfg.effective_taps();
  const double max_tau = (cp - 1) * cfg.sample_duration_s;
  Vector grid = angle_grid(num_antennas);

  std::vector<std::vector<Matrix>> spectra(scn.num_ues());
  for (int k = 0; k < scn.num_ues(); ++k) {
    spectra[k].resize(scn.num_aps());
    for (int l = 0; l < scn.num_aps(); ++l) {
      Matrix sp = Matrix::Zero(num_antennas, cp);
      for (int n = 0; n < num_antennas; ++n) {
        double width = grid[n + 1] - grid[n];
        double pas =
            angle_power_profile(grid[n], scn.mean_aoa(k, l), cfg.angle_spread_rad);
        for (int q = 0; q < taps; ++q) {
          double pds = delay_power_profile(q * cfg.sample_duration_s,
                                           cfg.delay_spread_s, max_tau);
          sp(n, q) = width * pas * pds;
        }
      }
      double total = sp.sum();
      if (!(total > 0.0))
        throw std::runtime_error("build_power_spectrum: degenerate profile");
      // All proportionality constants are absorbed by pinning the total power.
      sp *= static_cast<double>(num_antennas) * cp / total;
      spectra[k][l] = std::move(sp);
    }
  }
  return PowerSpectrum(std::move(spectra), scn.beta, scn.mask);
}

CMatrix sample_link(const Matrix& variance, Rng& rng) {
  CMatrix h(variance.rows(), variance.cols());
  for (Eigen::Index i = 0; i < variance.rows(); ++i)
    for (Eigen::Index j = 0; j < variance.cols(); ++j)
      h(i, j) = std::sqrt(variance(i, j)) * rng.cgaussian();
  return h;
}

ChannelRealization sample_realization(const PowerSpectrum& spectra, Rng& rng) {
  ChannelRealization out;
  out.h.resize(spectra.num_ues());
  for (int k = 0; k < spectra.num_ues(); ++k) {
    out.h[k].resize(spectra.num_aps());
    for (int l = 0; l < spectra.num_aps(); ++l)
      out.h[k][l] = sample_link(spectra.beta(k, l) * spectra.spectrum(k, l), rng);
  }
  return out;
}

CMatrix to_space_frequency(const CMatrix& h, const TransformPair& t) {
  if (h.rows() != t.v.rows() || h.cols() != t.f.cols())
    throw std::invalid_argument("to_space_frequency: dimension mismatch");
  return t.v * h * t.f.transpose();
}

CMatrix from_space_frequency(const CMatrix& g, const TransformPair& t) {
  if (g.rows() != t.v.rows() || g.cols() != t.f.rows())
    throw std::invalid_argument("from_space_frequency: dimension mismatch");
  return t.v.adjoint() * g * t.f.conjugate();
}

CVector space_frequency_column(const CMatrix& h, const TransformPair& t, int subcarrier) {
  if (subcarrier < 0 || subcarrier >= t.f.rows())
    throw std::invalid_argument("space_frequency_column: subcarrier out of range");
  // g_s = V (h f_s) with f_s = row s of f; costs N*N_cp instead of N*N_cp*N_c.
  CVector fs = t.f.row(subcarrier).transpose();
  return t.v * (h * fs);
}

CMatrix covariance_from_spectrum(const Matrix& stacked_spectrum, int num_antennas,
                                 int num_subcarriers) {
  const Eigen::Index m = stacked_spectrum.rows();
  const Eigen::Index cp = stacked_spectrum.cols();
  if (m % num_antennas != 0)
    throw std::invalid_argument("covariance_from_spectrum: rows not a multiple of N");
  if (m * num_subcarriers > 4096)
    throw std::invalid_argument(
        "covariance_from_spectrum: M*N_c > 4096; validation scale only");
  TransformPair t = TransformPair::build(num_antennas, num_subcarriers, static_cast<int>(cp));
  const int num_aps = static_cast<int>(m) / num_antennas;

  // A = F kron V_M with V_M = I_L kron V; column (q*M + row-block) pairs up
  // with the column-major vec of the stacked spectrum.
  CMatrix a = CMatrix::Zero(m * num_subcarriers, m * cp);
  for (Eigen::Index q = 0; q < cp; ++q)
    for (Eigen::Index s = 0; s < num_subcarriers; ++s)
      for (int l = 0; l < num_aps; ++l)
        a.block(s * m + l * num_antennas, q * m + l * num_antennas, num_antennas,
                num_antennas) = t.f(s, q) * t.v;

  CVector d(m * cp);
  for (Eigen::Index q = 0; q < cp; ++q)
    for (Eigen::Index i = 0; i < m; ++i) d[q * m + i] = stacked_spectrum(i, q);

  return a * d.asDiagonal() * a.adjoint();
}

}  // namespace cfmimo

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <vector>

namespace cfmimo {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXd;
using CMatrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXd;
using CVector = Eigen::VectorXcd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kBoltzmann = 1.381e-23;  // J/K
inline constexpr double kNoiseTempK = 290.0;

/// Kahan-compensated accumulator. Used wherever a Monte-Carlo mean must not
/// depend on how the trial loop is chunked.
class KahanSum {
 public:
  void add(double x) {
    double y = x - comp_;
    double t = sum_ + y;
    comp_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace cfmimo

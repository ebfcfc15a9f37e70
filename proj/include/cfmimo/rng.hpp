// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "cfmimo/common.hpp"

namespace cfmimo {

/// splitmix64 finalizer; mixes a seed with a stream id so per-trial substreams
/// are decorrelated without sharing engine state.
inline uint64_t mix_seed(uint64_t seed, uint64_t stream) {
  uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Deterministic RNG wrapper around mt19937_64. Gaussians come from an
/// explicit Box-Muller so draws do not depend on the stdlib's
/// normal_distribution implementation.
class Rng {
 public:
  explicit Rng(uint64_t seed) : base_seed_(seed), engine_(mix_seed(seed, 0)) {}

  uint64_t seed() const { return base_seed_; }

  /// Independent substream for (this seed, stream id).
  Rng derive(uint64_t stream) const { return Rng(mix_seed(base_seed_, stream)); }

  /// Uniform on [0,1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 1.0 - uniform();  // (0,1], keeps log finite
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * kPi * u2);
    have_spare_ = true;
    return r * std::cos(2.0 * kPi * u2);
  }

  /// CN(0,1): unit-variance circularly symmetric complex Gaussian.
  Complex cgaussian() {
    double re = gaussian();
    double im = gaussian();
    return Complex(re * 0.7071067811865476, im * 0.7071067811865476);
  }

  /// Uniform integer in [0,n), rejection-free of modulo bias.
  uint64_t integer(uint64_t n) {
    uint64_t threshold = (0ULL - n) % n;  // 2^64 mod n
    for (;;) {
      uint64_t x = engine_();
      if (x >= threshold) return x % n;
    }
  }

  /// k distinct indices drawn from [0,n), in draw order.
  std::vector<int> sample_without_replacement(int n, int k) {
    std::vector<int> pool(n);
    std::iota(pool.begin(), pool.end(), 0);
    std::vector<int> out;
    out.reserve(k);
    for (int i = 0; i < k; ++i) {
      uint64_t j = integer(static_cast<uint64_t>(n - i));
      out.push_back(pool[i + static_cast<int>(j)]);
      std::swap(pool[i + static_cast<int>(j)], pool[i]);
    }
    return out;
  }

 private:
  uint64_t base_seed_;
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace cfmimo

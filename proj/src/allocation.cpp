// SPDX-License-Identifier: Apache-2.0
#include "cfmimo/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace cfmimo {

double overlap_coefficient(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("overlap_coefficient: shape mismatch");
  double na = a.norm();
  double nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::abs(a.cwiseProduct(b).sum()) / (na * nb);
}

std::vector<std::vector<int>> kmeans_cluster(const Matrix& beta, int num_clusters,
                                             Rng& rng) {
  const int num_ues = static_cast<int>(beta.rows());
  if (num_clusters <= 0 || num_clusters > num_ues)
    throw std::invalid_argument("kmeans_cluster: need 0 < J <= K");

  std::vector<Matrix> centroids(num_clusters);
  std::vector<int> seeds = rng.sample_without_replacement(num_ues, num_clusters);
  for (int j = 0; j < num_clusters; ++j) centroids[j] = beta.row(seeds[j]);

  std::vector<int> assign(num_ues, -1);
  for (int round = 0; round < 100; ++round) {
    // Assign to the most similar centroid; ties break to the lower cluster.
    std::vector<int> next(num_ues);
    std::vector<double> similarity(num_ues);
    for (int k = 0; k < num_ues; ++k) {
      int best = 0;
      double best_xi = -1.0;
      for (int j = 0; j < num_clusters; ++j) {
        double xi = overlap_coefficient(beta.row(k), centroids[j]);
        if (xi > best_xi) {
          best_xi = xi;
          best = j;
        }
      }
      next[k] = best;
      similarity[k] = best_xi;
    }
    // Repair empty clusters by reseeding from the worst-matched UE.
    for (int j = 0; j < num_clusters; ++j) {
      if (std::count(next.begin(), next.end(), j) > 0) continue;
      int worst = 0;
      for (int k = 1; k < num_ues; ++k)
        if (similarity[k] < similarity[worst]) worst = k;
      next[worst] = j;
      similarity[worst] = 2.0;  // claimed; not eligible for another empty cluster
      centroids[j] = beta.row(worst);
    }
    bool stable = (next == assign);
    assign = std::move(next);
    if (stable) break;
    for (int j = 0; j < num_clusters; ++j) {
      Matrix mean = Matrix::Zero(1, beta.cols());
      int count = 0;
      for (int k = 0; k < num_ues; ++k)
        if (assign[k] == j) {
          mean += beta.row(k);
          ++count;
        }
      if (count > 0) centroids[j] = mean / count;
    }
  }

  std::vector<std::vector<int>> clusters(num_clusters);
  for (int k = 0; k < num_ues; ++k) clusters[assign[k]].push_back(k);
  return clusters;
}

namespace {

/// Shared context for one allocation run: victim weight matrices and a memo
/// of overlap values keyed by (interferer, relative delay shift).
class OverlapScorer {
 public:
  OverlapScorer(const PowerSpectrum& spectra, const SystemConfig& cfg)
      : spectra_(spectra), cfg_(cfg) {}

  void set_victim(int ue) {
    victim_ = ue;
    Matrix masked = spectra_.stacked_masked(ue);
    weight_ = masked.cwiseProduct(masked);
    memo_.clear();
  }

  /// max over the interferer's allocated shifts of delta(group) * xi(...),
  /// for victim candidate shift `phi`.
  double worst_case(int interferer, const std::vector<int>& interferer_set, int phi) const {
    const int z = cfg_.pilot_symbols;
    int group = shift_group(phi, z);
    int offset = delay_offset(phi, z);
    double worst = 0.0;
    for (int other_phi : interferer_set) {
      if (shift_group(other_phi, z) != group) continue;
      int d = wrap_index(delay_offset(other_phi, z) - offset, cfg_.num_subcarriers);
      worst = std::max(worst, shifted_overlap(interferer, d));
    }
    return worst;
  }

 private:
  double shifted_overlap(int interferer, int d) const {
    auto key = std::make_pair(interferer, d);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    Matrix shifted =
        shift_spectrum(spectra_.stacked_beta(interferer), d, cfg_.num_subcarriers);
    double xi = overlap_coefficient(weight_, shifted);
    memo_.emplace(key, xi);
    return xi;
  }

  const PowerSpectrum& spectra_;
  const SystemConfig& cfg_;
  int victim_ = -1;
  Matrix weight_;
  mutable std::map<std::pair<int, int>, double> memo_;
};

/// True when the interferer's shifted spectrum is exactly zero everywhere the
/// victim's masked spectrum is nonzero, for every same-group shift pair.
bool exactly_disjoint(const PowerSpectrum& spectra, const SystemConfig& cfg,
                      const std::vector<std::vector<int>>& sets) {
  const int num_ues = spectra.num_ues();
  const int z = cfg.pilot_symbols;
  for (int k = 0; k < num_ues; ++k) {
    Matrix victim = spectra.stacked_masked(k);
    for (int other = 0; other < num_ues; ++other) {
      if (other == k) continue;
      Matrix interf = spectra.stacked_beta(other);
      for (int phi : sets[k]) {
        for (int other_phi : sets[other]) {
          if (shift_group(other_phi, z) != shift_group(phi, z)) continue;
          int d = delay_offset(other_phi, z) - delay_offset(phi, z);
          Matrix shifted = shift_spectrum(interf, d, cfg.num_subcarriers);
          if (victim.cwiseProduct(shifted).maxCoeff() > 0.0) return false;
        }
      }
    }
  }
  return true;
}

}  // namespace

AllocationOutcome allocate_apsp(const std::vector<std::vector<int>>& clusters,
                                const PowerSpectrum& spectra, const SystemConfig& cfg,
                                Rng& rng) {
  const int universe = cfg.shift_universe_size();
  const int set_size = cfg.apsp_set_size;
  if (universe < set_size)
    throw std::invalid_argument("allocate_apsp: universe smaller than |Y|");

  AllocationOutcome outcome;
  outcome.clusters = clusters;
  outcome.plan.num_subcarriers = cfg.num_subcarriers;
  outcome.plan.pilot_symbols = cfg.pilot_symbols;
  outcome.plan.sets.assign(spectra.num_ues(), {});

  OverlapScorer scorer(spectra, cfg);
  for (const auto& cluster : clusters) {
    if (cluster.empty()) continue;
    std::vector<int> allocated;

    // Seed UE: unconstrained random draw.
    std::vector<int> first = rng.sample_without_replacement(universe, set_size);
    std::sort(first.begin(), first.end());
    outcome.plan.sets[cluster[0]] = first;
    allocated.push_back(cluster[0]);

    for (size_t i = 1; i < cluster.size(); ++i) {
      int ue = cluster[i];
      scorer.set_victim(ue);

      // Summed worst-case interference against already-allocated cluster
      // members; the acceptance criterion divides by |K_al|, the fallback
      // ranking uses the raw sum.
      auto summed = [&](int phi) {
        double total = 0.0;
        for (int other : allocated)
          total += scorer.worst_case(other, outcome.plan.sets[other], phi);
        return total;
      };

      // Scan the universe in random order: admissible shifts exist in bulk
      // early on, and taking the lowest indices would concentrate every
      // cluster's sets at one end of the universe, piling up cross-cluster
      // collisions that the admission score (own cluster only) cannot see.
      std::vector<int> chosen;
      std::vector<double> scores(universe);
      std::vector<int> scan = rng.sample_without_replacement(universe, universe);
      for (int phi : scan) {
        if (static_cast<int>(chosen.size()) >= set_size) break;
        scores[phi] = summed(phi);
        if (scores[phi] / allocated.size() <= cfg.overlap_threshold)
          chosen.push_back(phi);
      }
      std::sort(chosen.begin(), chosen.end());
      if (static_cast<int>(chosen.size()) < set_size) {
        // Fallback: rank the whole universe by summed score, lowest first,
        // ties to the lower shift index.
        for (int phi = 0; phi < universe; ++phi) scores[phi] = summed(phi);
        std::vector<int> order(universe);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return scores[a] < scores[b]; });
        chosen.assign(order.begin(), order.begin() + set_size);
        std::sort(chosen.begin(), chosen.end());
      }
      outcome.plan.sets[ue] = chosen;
      allocated.push_back(ue);
    }
  }

  outcome.optimal = exactly_disjoint(spectra, cfg, outcome.plan.sets);
  return outcome;
}

std::vector<int> psop_universe(int num_subcarriers, int cp_length, int pilot_symbols) {
  std::vector<int> shifts;
  for (int q = 0; q < num_subcarriers / cp_length; ++q)
    for (int z = 0; z < pilot_symbols; ++z)
      shifts.push_back(z + pilot_symbols * q * cp_length);
  std::sort(shifts.begin(), shifts.end());
  return shifts;
}

PilotPlan rpa_psop(const SystemConfig& cfg, Rng& rng) {
  std::vector<int> universe =
      psop_universe(cfg.num_subcarriers, cfg.cp_length, cfg.pilot_symbols);
  if (universe.empty())
    throw std::invalid_argument("rpa_psop: no orthogonal pilots exist (N_cp > N_c)");
  PilotPlan plan;
  plan.num_subcarriers = cfg.num_subcarriers;
  plan.pilot_symbols = cfg.pilot_symbols;
  plan.sets.resize(cfg.num_ues);
  for (int k = 0; k < cfg.num_ues; ++k)
    plan.sets[k] = {universe[rng.integer(universe.size())]};
  return plan;
}

PilotPlan rpa_apsp(const SystemConfig& cfg, Rng& rng) {
  PilotPlan plan;
  plan.num_subcarriers = cfg.num_subcarriers;
  plan.pilot_symbols = cfg.pilot_symbols;
  plan.sets.resize(cfg.num_ues);
  for (int k = 0; k < cfg.num_ues; ++k)
    plan.sets[k] = {static_cast<int>(rng.integer(cfg.shift_universe_size()))};
  return plan;
}

double averaged_mse_ue(int ue, const PowerSpectrum& spectra,
                       const std::vector<int>& shifts, const std::vector<int>& active,
                       int num_subcarriers, double rho_p, int pilot_symbols) {
  int serving = 0;
  for (int l = 0; l < spectra.num_aps(); ++l)
    if (spectra.mask(ue, l) > 0.0) ++serving;
  if (serving == 0) throw std::invalid_argument("averaged_mse_ue: UE has no serving AP");

  const int own_group = shift_group(shifts.at(ue), pilot_symbols);
  const int own_offset = delay_offset(shifts.at(ue), pilot_symbols);

  Matrix masked = spectra.stacked_masked(ue);
  Matrix masked_beta = spectra.stacked_masked_beta(ue);
  Matrix denom = Matrix::Constant(masked.rows(), masked.cols(),
                                  1.0 / (rho_p * pilot_symbols));
  for (int other : active) {
    if (shift_group(shifts.at(other), pilot_symbols) != own_group) continue;
    int d = delay_offset(shifts.at(other), pilot_symbols) - own_offset;
    denom += shift_spectrum(spectra.stacked_beta(other), d, num_subcarriers);
  }
  double total = (masked - masked.cwiseProduct(masked_beta).cwiseQuotient(denom)).sum();
  return total / (static_cast<double>(num_subcarriers) * serving);
}

double averaged_mse(const PowerSpectrum& spectra, const std::vector<int>& shifts,
                    const std::vector<int>& active, int num_subcarriers, double rho_p,
                    int pilot_symbols) {
  if (active.empty()) throw std::invalid_argument("averaged_mse: empty active set");
  double total = 0.0;
  for (int ue : active)
    total += averaged_mse_ue(ue, spectra, shifts, active, num_subcarriers, rho_p,
                             pilot_symbols);
  return total / active.size();
}

namespace {

double exhaustive_expected_mse(const PilotPlan& plan, const PowerSpectrum& spectra,
                               const SystemConfig& cfg, double rho_p) {
  const int num_ues = spectra.num_ues();
  std::vector<int> shifts(num_ues, 0);
  std::vector<int> active;
  KahanSum expectation;
  // Depth-first over (inactive | active-with-shift) per UE; the weight of a
  // leaf is the exact probability of that activity/shift outcome.
  auto recurse = [&](auto&& self, int ue, double weight) -> void {
    if (ue == num_ues) {
      if (!active.empty())
        expectation.add(weight * averaged_mse(spectra, shifts, active,
                                              cfg.num_subcarriers, rho_p,
                                              cfg.pilot_symbols));
      return;
    }
    self(self, ue + 1, weight * (1.0 - cfg.activation_prob));
    const auto& set = plan.sets[ue];
    active.push_back(ue);
    for (int phi : set) {
      shifts[ue] = phi;
      self(self, ue + 1, weight * cfg.activation_prob / set.size());
    }
    active.pop_back();
  };
  recurse(recurse, 0, 1.0);
  return expectation.value();
}

}  // namespace

double expected_mse(const PilotPlan& plan, const PowerSpectrum& spectra,
                    const SystemConfig& cfg, uint64_t seed, double* std_error) {
  plan.validate();
  if (static_cast<int>(plan.sets.size()) != spectra.num_ues())
    throw std::invalid_argument("expected_mse: plan does not cover every UE");
  const double rho_p = cfg.normalized_snr();

  double leaves = 1.0;
  for (const auto& set : plan.sets) {
    leaves *= 1.0 + set.size();
    if (leaves > 1e4) break;
  }
  if (leaves <= 1e4) {
    if (std_error) *std_error = 0.0;  // enumeration is exact
    return exhaustive_expected_mse(plan, spectra, cfg, rho_p);
  }

  Rng rng(seed);
  const int num_ues = spectra.num_ues();
  std::vector<int> shifts(num_ues, 0);
  KahanSum total;
  KahanSum total_sq;
  for (int trial = 0; trial < cfg.mc_samples; ++trial) {
    std::vector<int> active;
    for (int k = 0; k < num_ues; ++k) {
      if (rng.uniform() >= cfg.activation_prob) continue;
      active.push_back(k);
      shifts[k] = plan.sets[k][rng.integer(plan.sets[k].size())];
    }
    if (active.empty()) continue;  // contributes zero, matching the K_a >= 1 sum
    const double v = averaged_mse(spectra, shifts, active, cfg.num_subcarriers, rho_p,
                                  cfg.pilot_symbols);
    total.add(v);
    total_sq.add(v * v);
  }
  const double mean = total.value() / cfg.mc_samples;
  if (std_error) {
    const double var = std::max(0.0, total_sq.value() / cfg.mc_samples - mean * mean);
    *std_error = std::sqrt(var / cfg.mc_samples);
  }
  return mean;
}

double expected_mse_given_ka(const PilotPlan& plan, const PowerSpectrum& spectra,
                             const SystemConfig& cfg, int num_active, uint64_t seed,
                             double* std_error) {
  plan.validate();
  const int num_ues = spectra.num_ues();
  if (num_active < 1 || num_active > num_ues)
    throw std::invalid_argument("expected_mse_given_ka: K_a out of range");
  const double rho_p = cfg.normalized_snr();

  Rng rng(seed);
  std::vector<int> shifts(num_ues, 0);
  KahanSum total;
  KahanSum total_sq;
  for (int trial = 0; trial < cfg.mc_samples; ++trial) {
    std::vector<int> active = rng.sample_without_replacement(num_ues, num_active);
    std::sort(active.begin(), active.end());
    for (int k : active) shifts[k] = plan.sets[k][rng.integer(plan.sets[k].size())];
    const double v = averaged_mse(spectra, shifts, active, cfg.num_subcarriers, rho_p,
                                  cfg.pilot_symbols);
    total.add(v);
    total_sq.add(v * v);
  }
  const double mean = total.value() / cfg.mc_samples;
  if (std_error) {
    const double var = std::max(0.0, total_sq.value() / cfg.mc_samples - mean * mean);
    *std_error = std::sqrt(var / cfg.mc_samples);
  }
  return mean;
}

double mse_floor(const PowerSpectrum& spectra, int num_subcarriers, double rho_p,
                 int pilot_symbols) {
  const double noise = 1.0 / (rho_p * pilot_symbols);
  KahanSum total;
  for (int k = 0; k < spectra.num_ues(); ++k) {
    int serving = 0;
    for (int l = 0; l < spectra.num_aps(); ++l)
      if (spectra.mask(k, l) > 0.0) ++serving;
    if (serving == 0) throw std::invalid_argument("mse_floor: UE has no serving AP");
    Matrix masked = spectra.stacked_masked(k);
    Matrix masked_beta = spectra.stacked_masked_beta(k);
    // Interference-free denominator: own beta-weighted spectrum plus noise.
    Matrix denom = spectra.stacked_beta(k) +
                   Matrix::Constant(masked.rows(), masked.cols(), noise);
    double value = (masked - masked.cwiseProduct(masked_beta).cwiseQuotient(denom)).sum();
    total.add(value / (static_cast<double>(num_subcarriers) * serving));
  }
  return total.value() / spectra.num_ues();
}

double mse_lower_bound(const PowerSpectrum& spectra, const SystemConfig& cfg) {
  // Binomial weights for K_a = 1..K, written as the printed sum.
  const int num_ues = cfg.num_ues;
  const double p = cfg.activation_prob;
  double weight_sum = 0.0;
  double pmf = std::pow(1.0 - p, num_ues);  // P(K_a = 0)
  for (int ka = 1; ka <= num_ues; ++ka) {
    // Recurrence p(ka) = p(ka-1) * (K-ka+1)/ka * p/(1-p), stable for the
    // moderate K used here; falls back to direct form at p == 1.
    if (p == 1.0) {
      pmf = (ka == num_ues) ? 1.0 : 0.0;
    } else {
      pmf *= (static_cast<double>(num_ues - ka + 1) / ka) * (p / (1.0 - p));
    }
    weight_sum += pmf;
  }
  return weight_sum *
         mse_floor(spectra, cfg.num_subcarriers, cfg.normalized_snr(), cfg.pilot_symbols);
}

}  // namespace cfmimo

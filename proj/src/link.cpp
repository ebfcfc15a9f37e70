// SPDX-License-Identifier: Apache-2.0
#include "cfmimo/link.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <thread>
#include <utility>
#include <vector>

namespace cfmimo {
namespace {

// Chunk size is a fixed constant, not derived from the thread count, so the
// merge order (and therefore every output bit) is identical on any machine.
constexpr int kChunkTrials = 64;

template <typename D>
void kahan_add(D& sum, D& comp, const D& x) {
  D y = x - comp;
  D t = sum + y;
  comp = (t - sum) - y;
  sum = t;
}

/// Runs [0, trials) in fixed chunks, up to hardware_concurrency at a time,
/// merging results strictly in chunk order.
template <typename Chunk, typename Work, typename Merge>
void run_in_waves(int trials, Work work, Merge merge) {
  const int chunks = (trials + kChunkTrials - 1) / kChunkTrials;
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  const int wave = static_cast<int>(hw);
  for (int start = 0; start < chunks; start += wave) {
    const int batch = std::min(chunks - start, wave);
    std::vector<std::future<Chunk>> futs;
    futs.reserve(batch);
    for (int b = 0; b < batch; ++b) {
      const int t0 = (start + b) * kChunkTrials;
      const int t1 = std::min(trials, t0 + kChunkTrials);
      futs.push_back(std::async(std::launch::async, work, t0, t1));
    }
    for (auto& f : futs) merge(f.get());
  }
}

/// Everything one trial produces that either Monte-Carlo pass consumes.
struct TrialData {
  std::vector<int> shifts;  // size K; only active entries are meaningful
  ChannelRealization real;  // filled for active UEs at every AP
  CMatrix gcols;            // (L*N) x Ka actual channel columns at s
  CMatrix ghat;             // (L*N) x Ka estimated columns, zero off-serving
  CMatrix comb;             // (L*N) x Ka masked normalized combiners
  long zero_blocks = 0;
};

/// Fixed draw order: shifts over `active`, then channels over active x APs,
/// then pilot noise per (active UE, serving AP). Both passes call this with
/// the same per-trial substream, which keeps their comparisons paired.
TrialData draw_trial(const Scenario& scn, const PowerSpectrum& spectra,
                     const PilotPlan& plan, const std::vector<int>& active,
                     int subcarrier, const TransformPair& t, Rng& rng) {
  const int num_ues = spectra.num_ues();
  const int num_aps = spectra.num_aps();
  const int n = spectra.num_antennas();
  const int ka = static_cast<int>(active.size());
  const int nc = plan.num_subcarriers;

  TrialData td;
  td.shifts.assign(num_ues, 0);
  for (int k : active) {
    const auto& set = plan.sets.at(k);
    td.shifts[k] = set[static_cast<int>(rng.integer(set.size()))];
  }

  td.real.h.assign(num_ues, std::vector<CMatrix>(num_aps));
  for (int k : active)
    for (int l = 0; l < num_aps; ++l)
      td.real.h[k][l] = sample_link(spectra.beta(k, l) * spectra.spectrum(k, l), rng);

  td.gcols.setZero(num_aps * n, ka);
  td.ghat.setZero(num_aps * n, ka);
  td.comb.setZero(num_aps * n, ka);
  for (int j = 0; j < ka; ++j) {
    const int k = active[j];
    for (int l = 0; l < num_aps; ++l)
      td.gcols.col(j).segment(l * n, n) =
          space_frequency_column(td.real.h[k][l], t, subcarrier);
  }
  for (int j = 0; j < ka; ++j) {
    const int k = active[j];
    for (int l : scn.serving[k]) {
      CMatrix obs = synthesize_decorrelated(k, l, td.real, td.shifts, active, spectra,
                                            nc, scn.rho_p, plan.pilot_symbols, rng);
      Matrix gain = mmse_gain(k, l, spectra, td.shifts, active, nc, scn.rho_p,
                              plan.pilot_symbols);
      CMatrix hhat = std::sqrt(spectra.beta(k, l)) * mmse_estimate(obs, gain);
      CVector gh = space_frequency_column(hhat, t, subcarrier);
      if (gh.squaredNorm() == 0.0) ++td.zero_blocks;
      td.ghat.col(j).segment(l * n, n) = gh;
      td.comb.col(j).segment(l * n, n) = mrc_combiner(gh);
    }
  }
  return td;
}

struct StatsChunk {
  Vector zr, zi, zr2, zi2;  // own-signal inner product: Re, Im and their squares
  Matrix x, x2;             // |c^H g|^2 and its square
  Vector w, w2;             // ||c||^2 and its square
  long zero_blocks = 0;

  explicit StatsChunk(int ka)
      : zr(Vector::Zero(ka)),
        zi(Vector::Zero(ka)),
        zr2(Vector::Zero(ka)),
        zi2(Vector::Zero(ka)),
        x(Matrix::Zero(ka, ka)),
        x2(Matrix::Zero(ka, ka)),
        w(Vector::Zero(ka)),
        w2(Vector::Zero(ka)) {}
};

void check_power_coefficients(const Vector& eta, int ka) {
  if (static_cast<int>(eta.size()) != ka)
    throw std::invalid_argument("power coefficients: size does not match active set");
  for (int j = 0; j < ka; ++j)
    if (!(eta(j) >= -1e-12) || !(eta(j) <= 1.0 + 1e-12))
      throw std::invalid_argument("power coefficients: value outside [0,1]");
}

}  // namespace

CVector mrc_combiner(const CVector& ghat) {
  const double energy = ghat.squaredNorm();
  if (energy == 0.0) return CVector::Zero(ghat.size());
  return ghat / energy;
}

uint64_t link_cache_key(uint64_t scenario_seed, uint64_t plan_key,
                        const std::vector<int>& active, int subcarrier, int trials,
                        uint64_t seed) {
  uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](uint64_t v) {
    for (int b = 0; b < 8; ++b) {
      h ^= (v >> (8 * b)) & 0xffULL;
      h *= 1099511628211ULL;
    }
  };
  mix(scenario_seed);
  mix(plan_key);
  mix(static_cast<uint64_t>(active.size()));
  for (int k : active) mix(static_cast<uint64_t>(k));
  mix(static_cast<uint64_t>(subcarrier));
  mix(static_cast<uint64_t>(trials));
  mix(seed);
  return h;
}

LinkStatistics estimate_link_statistics(const Scenario& scn,
                                        const PowerSpectrum& spectra,
                                        const PilotPlan& plan,
                                        const std::vector<int>& active,
                                        int subcarrier, int trials, uint64_t seed) {
  if (trials < 500)
    throw std::invalid_argument("estimate_link_statistics: trials must be >= 500");
  if (active.empty())
    throw std::invalid_argument("estimate_link_statistics: active set is empty");
  if (subcarrier < 0 || subcarrier >= plan.num_subcarriers)
    throw std::invalid_argument("estimate_link_statistics: subcarrier out of range");
  plan.validate();
  const int ka = static_cast<int>(active.size());
  const TransformPair t = TransformPair::build(spectra.num_antennas(),
                                               plan.num_subcarriers,
                                               spectra.cp_length());
  const Rng root(seed);

  auto work = [&](int t0, int t1) {
    StatsChunk chunk(ka);
    for (int trial = t0; trial < t1; ++trial) {
      Rng rng = root.derive(static_cast<uint64_t>(trial));
      TrialData td = draw_trial(scn, spectra, plan, active, subcarrier, t, rng);
      chunk.zero_blocks += td.zero_blocks;
      for (int j = 0; j < ka; ++j) {
        for (int j2 = 0; j2 < ka; ++j2) {
          const Complex z = td.comb.col(j).dot(td.gcols.col(j2));
          const double p = std::norm(z);
          chunk.x(j, j2) += p;
          chunk.x2(j, j2) += p * p;
          if (j2 == j) {
            chunk.zr(j) += z.real();
            chunk.zi(j) += z.imag();
            chunk.zr2(j) += z.real() * z.real();
            chunk.zi2(j) += z.imag() * z.imag();
          }
        }
        const double nrm = td.comb.col(j).squaredNorm();
        chunk.w(j) += nrm;
        chunk.w2(j) += nrm * nrm;
      }
    }
    return chunk;
  };

  StatsChunk total(ka);
  StatsChunk comp(ka);  // Kahan compensations for the chunk merge
  auto merge = [&](const StatsChunk& c) {
    kahan_add(total.zr, comp.zr, c.zr);
    kahan_add(total.zi, comp.zi, c.zi);
    kahan_add(total.zr2, comp.zr2, c.zr2);
    kahan_add(total.zi2, comp.zi2, c.zi2);
    kahan_add(total.x, comp.x, c.x);
    kahan_add(total.x2, comp.x2, c.x2);
    kahan_add(total.w, comp.w, c.w);
    kahan_add(total.w2, comp.w2, c.w2);
    total.zero_blocks += c.zero_blocks;
  };
  run_in_waves<StatsChunk>(trials, work, merge);

  const double inv_t = 1.0 / static_cast<double>(trials);
  LinkStatistics stats;
  stats.active = active;
  stats.subcarrier = subcarrier;
  stats.trials = trials;
  stats.rho_u = scn.rho_u;
  stats.zero_combiner_blocks = total.zero_blocks;
  stats.key = link_cache_key(scn.seed, plan_hash(plan), active, subcarrier, trials,
                             seed);

  stats.coh.resize(ka);
  stats.coh_se.resize(ka);
  stats.cnorm.resize(ka);
  stats.cnorm_se.resize(ka);
  stats.cross = total.x * inv_t;
  Matrix xvar = (total.x2 * inv_t - stats.cross.cwiseProduct(stats.cross))
                    .cwiseMax(0.0) * inv_t;
  stats.cross_se = xvar.cwiseSqrt();
  for (int j = 0; j < ka; ++j) {
    const double mr = total.zr(j) * inv_t;
    const double mi = total.zi(j) * inv_t;
    stats.coh(j) = mr * mr + mi * mi;
    const double vr = std::max(0.0, total.zr2(j) * inv_t - mr * mr) * inv_t;
    const double vi = std::max(0.0, total.zi2(j) * inv_t - mi * mi) * inv_t;
    stats.coh_se(j) = 2.0 * std::sqrt(mr * mr * vr + mi * mi * vi);
    stats.cnorm(j) = total.w(j) * inv_t;
    const double vw = std::max(0.0, total.w2(j) * inv_t - stats.cnorm(j) * stats.cnorm(j));
    stats.cnorm_se(j) = std::sqrt(vw * inv_t);
  }
  return stats;
}

Vector sinr_lb(const Vector& eta, const LinkStatistics& stats) {
  const int ka = stats.num_active();
  check_power_coefficients(eta, ka);
  if (!(stats.rho_u > 0.0))
    throw std::invalid_argument("sinr_lb: statistics carry no positive data SNR");
  const Vector e = eta.cwiseMax(0.0).cwiseMin(1.0);
  Vector out(ka);
  for (int j = 0; j < ka; ++j) {
    const double num = e(j) * stats.coh(j);
    const double den = stats.cross.row(j).dot(e) - num + stats.cnorm(j) / stats.rho_u;
    if (!(den > 0.0)) throw std::logic_error("sinr_lb: nonpositive denominator");
    out(j) = num / den;
  }
  return out;
}

Vector se_lb(const Vector& eta, const LinkStatistics& stats, const SystemConfig& cfg) {
  const Vector sinr = sinr_lb(eta, stats);
  const double prelog = cfg.prelog_factor();
  Vector out(sinr.size());
  for (Eigen::Index j = 0; j < sinr.size(); ++j)
    out(j) = prelog * std::log2(1.0 + sinr(j));
  return out;
}

Vector se_genie(const Vector& eta, const Scenario& scn, const PowerSpectrum& spectra,
                const PilotPlan& plan, const std::vector<int>& active, int subcarrier,
                int trials, uint64_t seed, const SystemConfig& cfg) {
  if (trials < 200) throw std::invalid_argument("se_genie: trials must be >= 200");
  if (active.empty()) throw std::invalid_argument("se_genie: active set is empty");
  const int ka = static_cast<int>(active.size());
  check_power_coefficients(eta, ka);
  const Vector e = eta.cwiseMax(0.0).cwiseMin(1.0);
  const int n = spectra.num_antennas();
  const int num_aps = spectra.num_aps();
  if (num_aps * n > 4096)
    throw std::invalid_argument("se_genie: total antenna count exceeds the 4096 guard");
  const int nc = plan.num_subcarriers;
  plan.validate();
  const TransformPair t = TransformPair::build(n, nc, spectra.cp_length());
  const Rng root(seed);
  const double rho_u = scn.rho_u;

  auto work = [&](int t0, int t1) {
    Vector acc = Vector::Zero(ka);
    for (int trial = t0; trial < t1; ++trial) {
      Rng rng = root.derive(static_cast<uint64_t>(trial));
      TrialData td = draw_trial(scn, spectra, plan, active, subcarrier, t, rng);

      // Diagonal of each interferer's estimation-error covariance in the
      // per-AP angle basis: beta-weighted row sums of the error spectrum at
      // serving APs, of the full spectrum elsewhere (no estimate exists).
      std::vector<std::vector<Vector>> dblk(ka, std::vector<Vector>(num_aps));
      for (int j2 = 0; j2 < ka; ++j2) {
        const int k2 = active[j2];
        for (int l = 0; l < num_aps; ++l) {
          Matrix err = spectra.mask(k2, l) != 0.0
                           ? mmse_error_spectrum(k2, l, spectra, td.shifts, active,
                                                 nc, scn.rho_p, plan.pilot_symbols)
                           : spectra.spectrum(k2, l);
          Vector d = spectra.beta(k2, l) * err.rowwise().sum();
          if (d.minCoeff() < -1e-9)
            throw std::logic_error("se_genie: error covariance lost positivity");
          dblk[j2][l] = d.cwiseMax(0.0);
        }
      }

      for (int j = 0; j < ka; ++j) {
        const int k = active[j];
        // |V^H c_l|^2 per serving AP, for the error-covariance quadratic form.
        std::vector<Vector> asq;
        asq.reserve(scn.serving[k].size());
        for (int l : scn.serving[k])
          asq.push_back(
              (t.v.adjoint() * td.comb.col(j).segment(l * n, n)).cwiseAbs2());

        const double num = rho_u * e(j) * std::norm(td.comb.col(j).dot(td.ghat.col(j)));
        double den = td.comb.col(j).squaredNorm();
        for (int j2 = 0; j2 < ka; ++j2) {
          if (j2 != j)
            den += rho_u * e(j2) * std::norm(td.comb.col(j).dot(td.ghat.col(j2)));
          double quad = 0.0;
          for (size_t si = 0; si < scn.serving[k].size(); ++si)
            quad += dblk[j2][scn.serving[k][si]].dot(asq[si]);
          den += rho_u * e(j2) * quad / static_cast<double>(nc);
        }
        acc(j) += (num > 0.0 && den > 0.0) ? std::log2(1.0 + num / den) : 0.0;
      }
    }
    return acc;
  };

  Vector total = Vector::Zero(ka);
  Vector comp = Vector::Zero(ka);
  auto merge = [&](const Vector& c) { kahan_add(total, comp, c); };
  run_in_waves<Vector>(trials, work, merge);
  return cfg.prelog_factor() * total / static_cast<double>(trials);
}

void save_stats(std::ostream& out, const LinkStatistics& stats) {
  const int ka = stats.num_active();
  out.precision(17);
  out << "linkstats1\n";
  out << stats.key << ' ' << stats.subcarrier << ' ' << stats.trials << ' '
      << stats.rho_u << ' ' << stats.zero_combiner_blocks << ' ' << ka << '\n';
  for (int j = 0; j < ka; ++j) out << stats.active[j] << (j + 1 < ka ? ' ' : '\n');
  auto emit_vec = [&out, ka](const Vector& v) {
    for (int j = 0; j < ka; ++j) out << v(j) << (j + 1 < ka ? ' ' : '\n');
  };
  auto emit_mat = [&out, ka](const Matrix& m) {
    for (int j = 0; j < ka; ++j)
      for (int j2 = 0; j2 < ka; ++j2) out << m(j, j2) << (j2 + 1 < ka ? ' ' : '\n');
  };
  emit_vec(stats.coh);
  emit_vec(stats.coh_se);
  emit_vec(stats.cnorm);
  emit_vec(stats.cnorm_se);
  emit_mat(stats.cross);
  emit_mat(stats.cross_se);
}

LinkStatistics load_stats(std::istream& in) {
  std::string magic;
  in >> magic;
  if (magic != "linkstats1")
    throw std::runtime_error("load_stats: not a statistics file");
  LinkStatistics stats;
  int ka = 0;
  in >> stats.key >> stats.subcarrier >> stats.trials >> stats.rho_u >>
      stats.zero_combiner_blocks >> ka;
  if (!in || ka <= 0) throw std::runtime_error("load_stats: bad header");
  stats.active.resize(ka);
  for (int j = 0; j < ka; ++j) in >> stats.active[j];
  auto read_vec = [&in, ka](Vector& v) {
    v.resize(ka);
    for (int j = 0; j < ka; ++j) in >> v(j);
  };
  auto read_mat = [&in, ka](Matrix& m) {
    m.resize(ka, ka);
    for (int j = 0; j < ka; ++j)
      for (int j2 = 0; j2 < ka; ++j2) in >> m(j, j2);
  };
  read_vec(stats.coh);
  read_vec(stats.coh_se);
  read_vec(stats.cnorm);
  read_vec(stats.cnorm_se);
  read_mat(stats.cross);
  read_mat(stats.cross_se);
  if (!in) throw std::runtime_error("load_stats: truncated statistics file");
  return stats;
}

LinkStatistics cached_link_statistics(const std::string& path, const Scenario& scn,
                                      const PowerSpectrum& spectra,
                                      const PilotPlan& plan,
                                      const std::vector<int>& active, int subcarrier,
                                      int trials, uint64_t seed) {
  const uint64_t expect = link_cache_key(scn.seed, plan_hash(plan), active,
                                         subcarrier, trials, seed);
  if (!path.empty()) {
    std::ifstream in(path);
    if (in) {
      try {
        LinkStatistics stats = load_stats(in);
        if (stats.key == expect) return stats;
      } catch (const std::runtime_error&) {
        // fall through to recompute
      }
    }
  }
  LinkStatistics stats = estimate_link_statistics(scn, spectra, plan, active,
                                                  subcarrier, trials, seed);
  if (!path.empty()) {
    std::ofstream out(path);
    if (out) save_stats(out, stats);
  }
  return stats;
}

}  // namespace cfmimo

// Copyright 2026 The ecpsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ecpsim/imperfections.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "ecpsim/elements.h"
#include "ecpsim/errors.h"
#include "ecpsim/parallel.h"

namespace ecpsim {
namespace {

const ModeId kA1{"a1"};
const ModeId kA2{"a2"};
const ModeId kA3{"a3"};
const ModeId kC1{"c1"};
const ModeId kC2{"c2"};
const ModeId kB1{"b1"};

constexpr int kMaxEmission = 2;
constexpr std::int64_t kBlockSize = 1024;
constexpr double kTrueSuccessFidelity = 1.0 - 1e-9;

bool is_probability(double p) { return std::isfinite(p) && p >= 0.0 && p <= 1.0; }

std::string state_key(const StateVector& s) {
  std::string key;
  for (const auto& m : s.modes()) key += m.name() + ";";
  char buf[64];
  for (const auto& [ket, amp] : s.terms()) {
    std::snprintf(buf, sizeof buf, "=%.17g,%.17g|", amp.real(), amp.imag());
    key += ket.to_string() + buf;
  }
  return key;
}

// Fidelity with the Bell target, zero outside the one-photon-per-mode sector.
double target_fidelity(const StateVector& kept) {
  static const StateVector target = target_state(2);
  if (kept.empty() || kept.modes() != target.modes() || kept.photon_number() != 2) return 0.0;
  for (const auto& [ket, amp] : kept.terms()) {
    if (ket.occupation(kC1) != 1 || ket.occupation(kB1) != 1) return 0.0;
  }
  return std::min(1.0, fidelity(target, kept));
}

std::size_t sample_index(const std::vector<double>& cdf, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, cdf.back());
  const double x = u(rng);
  for (std::size_t i = 0; i < cdf.size(); ++i) {
    if (x < cdf[i]) return i;
  }
  return cdf.size() - 1;
}

int thin(int count, double efficiency, std::mt19937_64& rng) {
  if (count == 0 || efficiency >= 1.0) return count;
  std::binomial_distribution<int> d(count, efficiency);
  return d(rng);
}

bool readout_valid(const DetectorModel& det, int d1, int d2) {
  return det.number_resolving ? d1 + d2 == 1 : ((d1 > 0) != (d2 > 0));
}

bool pair_verified(const DetectorModel& det, int c1, int b1) {
  return det.number_resolving ? (c1 == 1 && b1 == 1) : (c1 > 0 && b1 > 0);
}

template <class Key, class KeyFn>
std::map<Key, StateVector::Terms> group_terms(const StateVector& s, const ModeId* absorbed,
                                              KeyFn key_fn) {
  std::map<Key, StateVector::Terms> groups;
  for (const auto& [ket, amp] : s.terms()) {
    groups[key_fn(ket)][absorbed ? ket.without_mode(*absorbed) : ket] += amp;
  }
  return groups;
}

std::vector<double> cumulative(const std::vector<double>& weights) {
  std::vector<double> cdf;
  double acc = 0.0;
  for (double w : weights) cdf.push_back(acc += w);
  return cdf;
}

PairCoefficients ancilla_for_round(const PairCoefficients& coeffs, int round) {
  PairCoefficients c = coeffs;
  for (int r = 1; r < round; ++r) c = c.squared();
  return c;
}

std::array<int, 2> sample_emissions(const SourceModel& pair, const SourceModel& single,
                                    std::mt19937_64& rng) {
  const int m_pair = sample_photon_number(pair, rng);
  const int m_anc = sample_photon_number(single, rng);
  return {m_pair, m_anc};
}

// Runs per-trial work over fixed-size blocks so that the reduction order,
// and therefore every floating-point sum, is independent of thread count.
template <class TrialFn>
TrialTally run_blocks(std::int64_t n_trials, std::uint64_t seed, TrialFn trial_fn) {
  const std::int64_t n_blocks = (n_trials + kBlockSize - 1) / kBlockSize;
  std::vector<TrialTally> blocks(static_cast<std::size_t>(n_blocks));
  parallel_for(blocks.size(), [&](std::size_t begin, std::size_t end, std::size_t) {
    for (std::size_t b = begin; b < end; ++b) {
      TrialTally t;
      const std::int64_t first = static_cast<std::int64_t>(b) * kBlockSize;
      const std::int64_t last = std::min(n_trials, first + kBlockSize);
      for (std::int64_t i = first; i < last; ++i) {
        std::mt19937_64 rng(trial_seed(seed, static_cast<std::uint64_t>(i)));
        trial_fn(rng, t);
        ++t.n_trials;
      }
      blocks[b] = t;
    }
  });
  TrialTally total;
  for (const auto& b : blocks) total += b;
  return total;
}

void validate_run(const SourceModel& single, const SourceModel& pair, const DetectorModel& det,
                  std::int64_t n_trials) {
  single.validate();
  pair.validate();
  det.validate();
  if (n_trials < 1) throw InvalidCircuitError("n_trials must be at least 1");
}

void record_acceptance(TrialTally& t, double f) {
  ++t.accepted;
  if (f >= kTrueSuccessFidelity) {
    ++t.true_success;
  } else {
    ++t.false_success;
  }
  t.accepted_infidelity += 1.0 - f;
}

// ---------------------------------------------------------------------------
// Linear-optics outcome tables

struct PbsOutcome {
  int c1 = 0, d1 = 0, d2 = 0, b1 = 0;
  std::array<double, 2> fidelity{};  // kept-pair fidelity for readings D1, D2
};

struct PbsTable {
  std::vector<PbsOutcome> outcomes;
  std::vector<double> cdf;
};

PbsTable build_pbs_table(const PairCoefficients& coeffs, int m_pair, int m_anc) {
  const ModeId pair_modes[] = {kA1, kB1};
  StateVector s =
      tensor(make_multi_ghz_state(coeffs, pair_modes, m_pair), make_multi_photon(coeffs, kA2, m_anc));
  s = relabel_mode(apply_hwp90(s, kA2), kA2, kA3);
  s = apply_pbs(s, kA1, kA3, kC2, kC1);
  s = apply_hwp45_multiphoton(s, kC2);
  const double total = s.norm_squared();

  using Key = std::tuple<int, int, int, int>;
  auto groups = group_terms<Key>(s, &kC2, [](const BasisKet& k) {
    return Key{k.occupation(kC1), k.occupation(kC2, Polarization::H),
               k.occupation(kC2, Polarization::V), k.occupation(kB1)};
  });
  PbsTable table;
  std::vector<double> weights;
  std::set<ModeId> kept_modes{kC1, kB1};
  for (auto& [key, terms] : groups) {
    StateVector kept(kept_modes, std::move(terms));
    if (kept.empty()) continue;
    PbsOutcome o;
    std::tie(o.c1, o.d1, o.d2, o.b1) = key;
    const StateVector norm_kept = normalize(kept).state;
    o.fidelity[0] = target_fidelity(norm_kept);
    o.fidelity[1] = target_fidelity(apply_phase_flip(norm_kept, kC1));
    weights.push_back(kept.norm_squared() / total);
    table.outcomes.push_back(o);
  }
  table.cdf = cumulative(weights);
  return table;
}

// ---------------------------------------------------------------------------
// Cross-Kerr outcome tables, built lazily per (round, pair state, ancilla count)

struct Verification {
  int c1 = 0, b1 = 0;
  double fidelity = 0.0;
};

struct QndOutcome {
  bool herald = false;
  int d1 = 0, d2 = 0;
  // Per reading (D1, D2): verification distribution for heralded outcomes,
  // or the corrected pair to recycle otherwise.
  std::array<std::vector<Verification>, 2> verify;
  std::array<std::vector<double>, 2> verify_cdf;
  std::array<std::string, 2> next_key;
  std::array<std::shared_ptr<const StateVector>, 2> next_state;
};

struct QndTable {
  std::vector<QndOutcome> outcomes;
  std::vector<double> cdf;
};

class QndTableCache {
 public:
  QndTableCache(PairCoefficients coeffs, HomodyneScheme scheme)
      : coeffs_(coeffs), scheme_(scheme), classes_(homodyne_classes(scheme, 2 * kMaxEmission)) {}

  std::shared_ptr<const QndTable> get(int round, const std::string& key, const StateVector& pair,
                                      int m_anc) {
    const std::string full = std::to_string(round) + "#" + std::to_string(m_anc) + "#" + key;
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = cache_.find(full);
    if (it != cache_.end()) return it->second;
    auto table = std::make_shared<const QndTable>(build(round, pair, m_anc));
    cache_.emplace(full, table);
    return table;
  }

 private:
  QndTable build(int round, const StateVector& pair, int m_anc) const {
    StateVector s = tensor(pair, make_multi_photon(ancilla_for_round(coeffs_, round), kA2, m_anc));
    s = relabel_mode(apply_hwp90(s, kA2), kA2, kA3);
    s = apply_qnd_parity_check(s, scheme_);
    const std::size_t herald_class = *classes_.class_of(success_tag(scheme_));

    QndTable table;
    std::vector<double> weights;
    const std::set<ModeId> kept_modes{kC1, kB1};
    auto branches = homodyne_measure(s, classes_);
    for (std::size_t i = 0; i < branches.size(); ++i) {
      const Branch& b = branches[i];
      if (!b.state) continue;
      StateVector t = relabel_mode(relabel_mode(*b.state, kA1, kC1), kA3, kC2);
      t = apply_hwp45_multiphoton(t, kC2);
      using Key = std::pair<int, int>;
      auto groups = group_terms<Key>(t, &kC2, [](const BasisKet& k) {
        return Key{k.occupation(kC2, Polarization::H), k.occupation(kC2, Polarization::V)};
      });
      for (auto& [key, terms] : groups) {
        StateVector kept(kept_modes, std::move(terms));
        if (kept.empty()) continue;
        QndOutcome o;
        o.herald = i == herald_class;
        std::tie(o.d1, o.d2) = key;
        const double w = b.probability * kept.norm_squared();
        const StateVector norm_kept = normalize(kept).state;
        for (int reading = 0; reading < 2; ++reading) {
          const StateVector corrected = reading ? apply_phase_flip(norm_kept, kC1) : norm_kept;
          if (o.herald) {
            fill_verification(corrected, o.verify[reading], o.verify_cdf[reading]);
          } else {
            auto next = std::make_shared<const StateVector>(relabel_mode(corrected, kC1, kA1));
            o.next_key[reading] = state_key(*next);
            o.next_state[reading] = std::move(next);
          }
        }
        weights.push_back(w);
        table.outcomes.push_back(std::move(o));
      }
    }
    table.cdf = cumulative(weights);
    return table;
  }

  static void fill_verification(const StateVector& corrected, std::vector<Verification>& out,
                                std::vector<double>& cdf) {
    using Key = std::pair<int, int>;
    auto groups = group_terms<Key>(corrected, nullptr, [](const BasisKet& k) {
      return Key{k.occupation(kC1), k.occupation(kB1)};
    });
    std::vector<double> weights;
    for (auto& [key, terms] : groups) {
      StateVector part(corrected.modes(), std::move(terms));
      if (part.empty()) continue;
      Verification v;
      std::tie(v.c1, v.b1) = key;
      v.fidelity = target_fidelity(normalize(part).state);
      weights.push_back(part.norm_squared());
      out.push_back(v);
    }
    cdf = cumulative(weights);
  }

  PairCoefficients coeffs_;
  HomodyneScheme scheme_;
  HomodyneClass classes_;
  std::mutex mutex_;
  std::map<std::string, std::shared_ptr<const QndTable>> cache_;
};

}  // namespace

// ---------------------------------------------------------------------------

SourceModel SourceModel::single_photon(double p0, double p2) {
  SourceModel m;
  m.kind = SourceKind::SinglePhoton;
  m.p0 = p0;
  m.p2 = p2;
  m.p1 = 1.0 - p0 - p2;
  m.validate();
  return m;
}

SourceModel SourceModel::spdc(double gamma_sq, double p0) {
  if (!std::isfinite(gamma_sq) || gamma_sq < 0.0) {
    throw InvalidCircuitError("gamma_sq must be non-negative");
  }
  SourceModel m;
  m.kind = SourceKind::Spdc;
  m.gamma_sq = gamma_sq;
  m.p0 = p0;
  m.p1 = (1.0 - p0) / (1.0 + gamma_sq);
  m.p2 = (1.0 - p0) * gamma_sq / (1.0 + gamma_sq);
  m.validate();
  return m;
}

void SourceModel::validate() const {
  if (!is_probability(p0) || !is_probability(p1) || !is_probability(p2)) {
    throw InvalidCircuitError("source probabilities must lie in [0, 1]");
  }
  if (std::abs(p0 + p1 + p2 - 1.0) > kNormTolerance) {
    throw InvalidCircuitError("source probabilities must sum to 1");
  }
  if (!std::isfinite(gamma_sq) || gamma_sq < 0.0) {
    throw InvalidCircuitError("gamma_sq must be non-negative");
  }
}

void DetectorModel::validate() const {
  if (!std::isfinite(efficiency) || efficiency <= 0.0 || efficiency > 1.0) {
    throw InvalidCircuitError("detector efficiency must lie in (0, 1]");
  }
}

TrialTally& TrialTally::operator+=(const TrialTally& o) {
  n_trials += o.n_trials;
  accepted += o.accepted;
  true_success += o.true_success;
  false_success += o.false_success;
  vacuum_rejects += o.vacuum_rejects;
  accepted_infidelity += o.accepted_infidelity;
  return *this;
}

std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial) {
  // splitmix64 finalizer over a Weyl-sequence offset.
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (trial + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

int sample_photon_number(const SourceModel& model, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double x = u(rng);
  if (x < model.p0) return 0;
  if (x < model.p0 + model.p1) return 1;
  return 2;
}

TrialTally run_mc_pbs2(const PairCoefficients& coeffs, const SourceModel& single_source,
                       const SourceModel& pair_source, const DetectorModel& detectors,
                       std::int64_t n_trials, std::uint64_t seed) {
  validate_run(single_source, pair_source, detectors, n_trials);
  std::array<std::array<PbsTable, kMaxEmission + 1>, kMaxEmission + 1> tables;
  for (int mp = 0; mp <= kMaxEmission; ++mp) {
    for (int ma = 0; ma <= kMaxEmission; ++ma) tables[mp][ma] = build_pbs_table(coeffs, mp, ma);
  }
  const double eff = detectors.efficiency;

  return run_blocks(n_trials, seed, [&](std::mt19937_64& rng, TrialTally& t) {
    const auto [m_pair, m_anc] = sample_emissions(pair_source, single_source, rng);
    const PbsTable& table = tables[m_pair][m_anc];
    const PbsOutcome& o = table.outcomes[sample_index(table.cdf, rng)];
    const int c1 = thin(o.c1, eff, rng);
    const int d1 = thin(o.d1, eff, rng);
    const int d2 = thin(o.d2, eff, rng);
    const int b1 = thin(o.b1, eff, rng);
    if (readout_valid(detectors, d1, d2) && pair_verified(detectors, c1, b1)) {
      record_acceptance(t, o.fidelity[d1 > 0 ? 0 : 1]);
    } else if (m_pair == 0 || m_anc == 0) {
      ++t.vacuum_rejects;
    }
  });
}

TrialTally run_mc_qnd2(const PairCoefficients& coeffs, const SourceModel& single_source,
                       const SourceModel& pair_source, const DetectorModel& detectors,
                       int max_iterations, std::int64_t n_trials, std::uint64_t seed,
                       HomodyneScheme scheme) {
  validate_run(single_source, pair_source, detectors, n_trials);
  if (max_iterations < 1) throw InvalidCircuitError("max_iterations must be at least 1");

  QndTableCache cache(coeffs, scheme);
  const ModeId pair_modes[] = {kA1, kB1};
  std::array<std::shared_ptr<const StateVector>, kMaxEmission + 1> initial;
  std::array<std::string, kMaxEmission + 1> initial_key;
  for (int m = 0; m <= kMaxEmission; ++m) {
    initial[m] = std::make_shared<const StateVector>(make_multi_ghz_state(coeffs, pair_modes, m));
    initial_key[m] = state_key(*initial[m]);
  }
  const double eff = detectors.efficiency;

  return run_blocks(n_trials, seed, [&](std::mt19937_64& rng, TrialTally& t) {
    const int m_pair = sample_photon_number(pair_source, rng);
    bool vacuum = m_pair == 0;
    std::shared_ptr<const StateVector> pair = initial[m_pair];
    std::string key = initial_key[m_pair];
    for (int round = 1; round <= max_iterations; ++round) {
      const int m_anc = sample_photon_number(single_source, rng);
      vacuum = vacuum || m_anc == 0;
      const auto table = cache.get(round, key, *pair, m_anc);
      const QndOutcome& o = table->outcomes[sample_index(table->cdf, rng)];
      const int d1 = thin(o.d1, eff, rng);
      const int d2 = thin(o.d2, eff, rng);
      if (!readout_valid(detectors, d1, d2)) break;
      const int reading = d1 > 0 ? 0 : 1;
      if (o.herald) {
        const auto& checks = o.verify[reading];
        const Verification& v = checks[sample_index(o.verify_cdf[reading], rng)];
        if (pair_verified(detectors, thin(v.c1, eff, rng), thin(v.b1, eff, rng))) {
          record_acceptance(t, v.fidelity);
          return;
        }
        break;
      }
      pair = o.next_state[reading];
      key = o.next_key[reading];
    }
    if (vacuum) ++t.vacuum_rejects;
  });
}

Interval wilson_interval(std::int64_t successes, std::int64_t n, double z) {
  if (n <= 0) return {0.0, 1.0};
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(successes) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double centre = (p + z2 / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  // The exact endpoints are 0 and 1 at k = 0 and k = n; avoid rounding dust.
  const double lo = successes <= 0 ? 0.0 : std::max(0.0, centre - half);
  const double hi = successes >= n ? 1.0 : std::min(1.0, centre + half);
  return {lo, hi};
}

ErrorRateSummary error_rate_report(const TrialTally& tally) {
  if (tally.n_trials <= 0) throw InvalidCircuitError("tally has no trials");
  ErrorRateSummary s;
  s.acceptance_rate = static_cast<double>(tally.accepted) / static_cast<double>(tally.n_trials);
  s.acceptance_ci = wilson_interval(tally.accepted, tally.n_trials);
  s.false_acceptance_rate =
      static_cast<double>(tally.false_success) / static_cast<double>(tally.n_trials);
  if (tally.accepted > 0) {
    const double acc = static_cast<double>(tally.accepted);
    s.error_fraction = std::clamp(tally.accepted_infidelity / acc, 0.0, 1.0);
    s.false_fraction = static_cast<double>(tally.false_success) / acc;
    s.false_fraction_ci = wilson_interval(tally.false_success, tally.accepted);
  }
  return s;
}

}  // namespace ecpsim

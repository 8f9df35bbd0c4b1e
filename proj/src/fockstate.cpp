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

#include "ecpsim/fockstate.h"

#include <algorithm>
#include <cmath>
#include <utility>

#include "ecpsim/errors.h"

namespace ecpsim {

char polarization_char(Polarization pol) { return pol == Polarization::H ? 'H' : 'V'; }

Polarization flipped(Polarization pol) {
  return pol == Polarization::H ? Polarization::V : Polarization::H;
}

ModeId::ModeId(std::string name) : name_(std::move(name)) {
  if (name_.empty()) throw InvalidCircuitError("mode name must not be empty");
}

ModeId::ModeId(const char* name) : ModeId(std::string(name)) {}

// ---------------------------------------------------------------------------
// BasisKet

int BasisKet::occupation(const ModeId& mode, Polarization pol) const {
  auto it = occupations_.find(Slot{mode, pol});
  return it == occupations_.end() ? 0 : it->second;
}

int BasisKet::occupation(const ModeId& mode) const {
  return occupation(mode, Polarization::H) + occupation(mode, Polarization::V);
}

int BasisKet::photon_count() const {
  int total = 0;
  for (const auto& [slot, n] : occupations_) total += n;
  return total;
}

BasisKet BasisKet::with_occupation(const ModeId& mode, Polarization pol, int count) const {
  if (count < 0) throw InvalidCircuitError("negative occupation for mode " + mode.name());
  BasisKet out = *this;
  if (count == 0) {
    out.occupations_.erase(Slot{mode, pol});
  } else {
    out.occupations_[Slot{mode, pol}] = count;
  }
  return out;
}

BasisKet BasisKet::with_probe_tag(int tag) const {
  BasisKet out = *this;
  out.probe_tag_ = tag;
  return out;
}

BasisKet BasisKet::without_mode(const ModeId& mode) const {
  return with_occupation(mode, Polarization::H, 0).with_occupation(mode, Polarization::V, 0);
}

std::string BasisKet::to_string() const {
  std::string out;
  for (const auto& [slot, n] : occupations_) {
    for (int i = 0; i < n; ++i) {
      if (!out.empty()) out += ',';
      out += slot.mode.name();
      out += ':';
      out += polarization_char(slot.pol);
    }
  }
  if (probe_tag_ != 0) {
    if (!out.empty()) out += ',';
    out += "probe:" + std::to_string(probe_tag_);
  }
  return out;
}

// ---------------------------------------------------------------------------
// PairCoefficients

PairCoefficients::PairCoefficients(double alpha, double beta) : alpha_(alpha), beta_(beta) {
  if (!std::isfinite(alpha) || !std::isfinite(beta) || alpha < 0.0 || beta < 0.0 ||
      alpha > 1.0 || beta > 1.0) {
    throw InvalidCircuitError("coefficients must lie in [0, 1]");
  }
  if (std::abs(alpha * alpha + beta * beta - 1.0) > kNormTolerance) {
    throw InvalidCircuitError("coefficients must satisfy alpha^2 + beta^2 = 1");
  }
}

PairCoefficients PairCoefficients::from_alpha(double alpha) {
  if (!std::isfinite(alpha) || alpha < 0.0 || alpha > 1.0) {
    throw InvalidCircuitError("alpha must lie in [0, 1]");
  }
  return PairCoefficients(alpha, std::sqrt(std::max(0.0, 1.0 - alpha * alpha)));
}

PairCoefficients PairCoefficients::normalized(double a, double b) {
  if (!std::isfinite(a) || !std::isfinite(b) || a < 0.0 || b < 0.0) {
    throw InvalidCircuitError("coefficients must be finite and non-negative");
  }
  const double n = std::hypot(a, b);
  if (n == 0.0) throw DegenerateStateError("cannot normalize a zero coefficient pair");
  return PairCoefficients(std::min(1.0, a / n), std::min(1.0, b / n));
}

PairCoefficients PairCoefficients::squared() const {
  return normalized(alpha_ * alpha_, beta_ * beta_);
}

// ---------------------------------------------------------------------------
// StateVector

StateVector::StateVector(std::set<ModeId> modes, Terms terms) : modes_(std::move(modes)) {
  bool first = true;
  for (auto& [ket, amp] : terms) {
    if (!std::isfinite(amp.real()) || !std::isfinite(amp.imag())) {
      throw Error("non-finite amplitude on ket " + ket.to_string());
    }
    if (std::abs(amp) < kPruneThreshold) continue;
    for (const auto& [slot, n] : ket.occupations()) {
      if (!modes_.count(slot.mode)) {
        throw InvalidCircuitError("ket references mode outside universe: " + slot.mode.name());
      }
    }
    const int count = ket.photon_count();
    if (first) {
      photon_number_ = count;
      first = false;
    } else if (count != photon_number_) {
      throw InvalidCircuitError("kets with differing photon numbers in one state");
    }
    terms_.emplace(ket, amp);
  }
}

StateVector StateVector::vacuum() { return StateVector({}, {{BasisKet{}, Amplitude{1.0}}}); }

Amplitude StateVector::amplitude(const BasisKet& ket) const {
  auto it = terms_.find(ket);
  return it == terms_.end() ? Amplitude{} : it->second;
}

double StateVector::norm_squared() const {
  double total = 0.0;
  for (const auto& [ket, amp] : terms_) total += std::norm(amp);
  return total;
}

double StateVector::norm() const { return std::sqrt(norm_squared()); }

bool StateVector::is_normalized(double tol) const { return std::abs(norm() - 1.0) <= tol; }

StateVector StateVector::scaled(Amplitude factor) const {
  Terms out;
  for (const auto& [ket, amp] : terms_) out.emplace(ket, amp * factor);
  return StateVector(modes_, std::move(out));
}

// ---------------------------------------------------------------------------
// Construction

namespace {

void require_distinct(std::span<const ModeId> modes) {
  std::set<ModeId> seen;
  for (const auto& m : modes) {
    if (!seen.insert(m).second) {
      throw InvalidCircuitError("mode listed twice: " + m.name());
    }
  }
}

// Applies (alpha prod a_H^+ + beta prod a_V^+) to every ket, with the usual
// sqrt(n + 1) bosonic factors.
StateVector::Terms apply_ghz_creation(const StateVector::Terms& in, const PairCoefficients& c,
                                      std::span<const ModeId> modes) {
  StateVector::Terms out;
  for (const auto& [ket, amp] : in) {
    for (Polarization pol : {Polarization::H, Polarization::V}) {
      const double weight = pol == Polarization::H ? c.alpha() : c.beta();
      if (weight == 0.0) continue;
      BasisKet next = ket;
      double factor = weight;
      for (const auto& m : modes) {
        const int n = next.occupation(m, pol);
        factor *= std::sqrt(static_cast<double>(n + 1));
        next = next.with_occupation(m, pol, n + 1);
      }
      out[next] += amp * factor;
    }
  }
  return out;
}

}  // namespace

StateVector make_multi_ghz_state(const PairCoefficients& coeffs, std::span<const ModeId> modes,
                                 int count) {
  if (modes.empty()) throw InvalidCircuitError("at least one mode required");
  if (count < 0) throw InvalidCircuitError("negative photon count");
  require_distinct(modes);
  StateVector::Terms terms{{BasisKet{}, Amplitude{1.0}}};
  for (int i = 0; i < count; ++i) terms = apply_ghz_creation(terms, coeffs, modes);
  std::set<ModeId> universe(modes.begin(), modes.end());
  return normalize(StateVector(std::move(universe), std::move(terms))).state;
}

StateVector make_ghz_state(const PairCoefficients& coeffs, std::span<const ModeId> modes) {
  return make_multi_ghz_state(coeffs, modes, 1);
}

StateVector make_pair_state(const PairCoefficients& coeffs, const ModeId& mode_a,
                            const ModeId& mode_b) {
  const ModeId modes[] = {mode_a, mode_b};
  return make_ghz_state(coeffs, modes);
}

StateVector make_single_photon(const PairCoefficients& coeffs, const ModeId& mode) {
  return make_multi_photon(coeffs, mode, 1);
}

StateVector make_multi_photon(const PairCoefficients& coeffs, const ModeId& mode, int count) {
  const ModeId modes[] = {mode};
  return make_multi_ghz_state(coeffs, modes, count);
}

// ---------------------------------------------------------------------------
// Algebra

StateVector tensor(const StateVector& s1, const StateVector& s2) {
  std::set<ModeId> universe = s1.modes();
  for (const auto& m : s2.modes()) {
    if (!universe.insert(m).second) {
      throw InvalidCircuitError("tensor of states sharing mode " + m.name());
    }
  }
  StateVector::Terms out;
  for (const auto& [k1, a1] : s1.terms()) {
    for (const auto& [k2, a2] : s2.terms()) {
      BasisKet k = k1.with_probe_tag(k1.probe_tag() + k2.probe_tag());
      for (const auto& [slot, n] : k2.occupations()) k = k.with_occupation(slot.mode, slot.pol, n);
      out.emplace(std::move(k), a1 * a2);
    }
  }
  return StateVector(std::move(universe), std::move(out));
}

Amplitude inner_product(const StateVector& s1, const StateVector& s2) {
  if (s1.modes() != s2.modes()) {
    throw InvalidCircuitError("inner product between states on different mode universes");
  }
  if (!s1.empty() && !s2.empty() && s1.photon_number() != s2.photon_number()) {
    throw InvalidCircuitError("inner product between states of different photon number");
  }
  Amplitude total{};
  for (const auto& [ket, a1] : s1.terms()) {
    auto a2 = s2.amplitude(ket);
    total += std::conj(a1) * a2;
  }
  return total;
}

double fidelity(const StateVector& s1, const StateVector& s2) {
  return std::norm(inner_product(s1, s2));
}

NormalizedState normalize(const StateVector& s) {
  const double n = s.norm();
  if (!(n > 0.0)) throw DegenerateStateError("cannot normalize the zero state");
  return {n, s.scaled(Amplitude{1.0 / n})};
}

bool approx_equal(const StateVector& s1, const StateVector& s2, double tol) {
  if (s1.modes() != s2.modes()) return false;
  for (const auto& [ket, a] : s1.terms()) {
    if (std::abs(a - s2.amplitude(ket)) > tol) return false;
  }
  for (const auto& [ket, a] : s2.terms()) {
    if (std::abs(a - s1.amplitude(ket)) > tol) return false;
  }
  return true;
}

bool equal_up_to_global_phase(const StateVector& s1, const StateVector& s2, double tol) {
  if (s1.modes() != s2.modes()) return false;
  if (s1.empty() || s2.empty()) return s1.empty() && s2.empty();
  auto largest = std::max_element(s1.terms().begin(), s1.terms().end(), [](auto& x, auto& y) {
    return std::abs(x.second) < std::abs(y.second);
  });
  const Amplitude other = s2.amplitude(largest->first);
  if (std::abs(other) == 0.0) return false;
  const Amplitude ratio = other / largest->second;
  const Amplitude phase = ratio / std::abs(ratio);
  return approx_equal(s1.scaled(phase), s2, tol);
}

StateVector relabel_mode(const StateVector& s, const ModeId& from, const ModeId& to) {
  if (!s.has_mode(from)) throw InvalidCircuitError("unknown mode " + from.name());
  if (from == to) return s;
  if (s.has_mode(to)) throw InvalidCircuitError("mode already present: " + to.name());
  std::set<ModeId> universe = s.modes();
  universe.erase(from);
  universe.insert(to);
  StateVector::Terms out;
  for (const auto& [ket, amp] : s.terms()) {
    BasisKet k = ket.without_mode(from);
    for (Polarization pol : {Polarization::H, Polarization::V}) {
      k = k.with_occupation(to, pol, ket.occupation(from, pol));
    }
    out.emplace(std::move(k), amp);
  }
  return StateVector(std::move(universe), std::move(out));
}

}  // namespace ecpsim

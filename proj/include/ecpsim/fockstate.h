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

#pragma once

#include <compare>
#include <complex>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace ecpsim {

using Amplitude = std::complex<double>;

/// Amplitudes below this magnitude are dropped from a state.
inline constexpr double kPruneThreshold = 1e-15;
/// Tolerance for unit-norm and coefficient-normalization checks.
inline constexpr double kNormTolerance = 1e-12;

enum class Polarization : std::uint8_t { H, V };

char polarization_char(Polarization pol);
Polarization flipped(Polarization pol);

/// Name of a spatial mode ("a1", "b1", "c2", ...). Never empty.
class ModeId {
 public:
  ModeId(std::string name);  // NOLINT: implicit from string literals is intended
  ModeId(const char* name);  // NOLINT

  const std::string& name() const { return name_; }

  friend bool operator==(const ModeId&, const ModeId&) = default;
  friend std::strong_ordering operator<=>(const ModeId& a, const ModeId& b) {
    return a.name_.compare(b.name_) <=> 0;
  }

 private:
  std::string name_;
};

/// One (spatial mode, polarization) photon slot.
struct Slot {
  ModeId mode;
  Polarization pol;

  friend bool operator==(const Slot&, const Slot&) = default;
  friend auto operator<=>(const Slot&, const Slot&) = default;
};

/// A single photon configuration: occupation number per slot plus the
/// accumulated probe phase, in units of the elementary cross-Kerr shift.
class BasisKet {
 public:
  BasisKet() = default;

  int occupation(const ModeId& mode, Polarization pol) const;
  /// Total over both polarizations.
  int occupation(const ModeId& mode) const;
  int photon_count() const;
  int probe_tag() const { return probe_tag_; }

  /// Only non-zero occupations are stored.
  const std::map<Slot, int>& occupations() const { return occupations_; }

  BasisKet with_occupation(const ModeId& mode, Polarization pol, int count) const;
  BasisKet with_probe_tag(int tag) const;
  BasisKet without_mode(const ModeId& mode) const;

  /// Renders e.g. "a1:H,b1:H,probe:1". Multiply occupied slots repeat the
  /// token; the probe entry appears only for a non-zero tag.
  std::string to_string() const;

  friend bool operator==(const BasisKet&, const BasisKet&) = default;
  friend auto operator<=>(const BasisKet&, const BasisKet&) = default;

 private:
  std::map<Slot, int> occupations_;
  int probe_tag_ = 0;
};

/// Real, non-negative coefficients (alpha, beta) of alpha|H..H> + beta|V..V>.
class PairCoefficients {
 public:
  /// Throws InvalidCircuitError unless both lie in [0, 1] and
  /// alpha^2 + beta^2 = 1 within kNormTolerance.
  PairCoefficients(double alpha, double beta);

  static PairCoefficients from_alpha(double alpha);
  /// Rescales an arbitrary non-negative, non-zero pair onto the unit circle.
  static PairCoefficients normalized(double a, double b);

  double alpha() const { return alpha_; }
  double beta() const { return beta_; }

  /// (alpha^2, beta^2) renormalized: the coefficients of the recycled pair.
  PairCoefficients squared() const;
  PairCoefficients swapped() const { return PairCoefficients(beta_, alpha_); }

  friend bool operator==(const PairCoefficients&, const PairCoefficients&) = default;

 private:
  double alpha_;
  double beta_;
};

/// Sparse superposition of BasisKets over a declared mode universe.
/// Immutable once built; every operation returns a new state.
class StateVector {
 public:
  using Terms = std::map<BasisKet, Amplitude>;

  /// The zero vector over an empty universe.
  StateVector() = default;
  /// Validates that every ket lives inside `modes` and that all kets carry
  /// the same photon number; prunes negligible amplitudes.
  StateVector(std::set<ModeId> modes, Terms terms);

  /// The no-photon state over an empty universe; identity for tensor().
  static StateVector vacuum();

  const std::set<ModeId>& modes() const { return modes_; }
  const Terms& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }
  bool has_mode(const ModeId& mode) const { return modes_.count(mode) != 0; }
  int photon_number() const { return photon_number_; }

  Amplitude amplitude(const BasisKet& ket) const;
  double norm_squared() const;
  double norm() const;
  bool is_normalized(double tol = kNormTolerance) const;

  StateVector scaled(Amplitude factor) const;

 private:
  std::set<ModeId> modes_;
  Terms terms_;
  int photon_number_ = 0;
};

/// alpha|H>_a|H>_b + beta|V>_a|V>_b.
StateVector make_pair_state(const PairCoefficients& coeffs, const ModeId& mode_a,
                            const ModeId& mode_b);

/// alpha|H...H> + beta|V...V> with one photon in each listed mode.
StateVector make_ghz_state(const PairCoefficients& coeffs, std::span<const ModeId> modes);

/// alpha|H> + beta|V> in one mode.
StateVector make_single_photon(const PairCoefficients& coeffs, const ModeId& mode);

/// `count` bosons in `mode`, each created by alpha a_H^+ + beta a_V^+;
/// normalized. count = 1 reduces to make_single_photon.
StateVector make_multi_photon(const PairCoefficients& coeffs, const ModeId& mode, int count);

/// `count` applications of the GHZ creation operator
/// alpha prod a_H^+ + beta prod a_V^+ on the vacuum; normalized.
StateVector make_multi_ghz_state(const PairCoefficients& coeffs, std::span<const ModeId> modes,
                                 int count);

StateVector tensor(const StateVector& s1, const StateVector& s2);

/// <s1|s2>, conjugate-linear in s1.
Amplitude inner_product(const StateVector& s1, const StateVector& s2);

/// |<s1|s2>|^2.
double fidelity(const StateVector& s1, const StateVector& s2);

struct NormalizedState {
  double norm;
  StateVector state;
};

/// Throws DegenerateStateError for a zero (or numerically zero) state.
NormalizedState normalize(const StateVector& s);

/// Amplitude-wise comparison after removing the relative global phase.
bool equal_up_to_global_phase(const StateVector& s1, const StateVector& s2,
                              double tol = kNormTolerance);

/// Amplitude-wise comparison, no phase freedom.
bool approx_equal(const StateVector& s1, const StateVector& s2, double tol = kNormTolerance);

/// Renames a mode. `to` must not already be in the universe.
StateVector relabel_mode(const StateVector& s, const ModeId& from, const ModeId& to);

}  // namespace ecpsim

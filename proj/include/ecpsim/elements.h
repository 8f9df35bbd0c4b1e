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

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ecpsim/fockstate.h"

namespace ecpsim {

/// One outcome of a measurement or post-selection. `state` is normalized and
/// present whenever `probability` is non-zero.
struct Branch {
  double probability = 0.0;
  std::optional<StateVector> state;
  std::string label;
};

/// Partition of probe tags into sets a homodyne readout cannot tell apart.
class HomodyneClass {
 public:
  struct Outcome {
    std::string label;
    std::set<int> tags;
  };

  /// Throws PartitionError if two outcomes share a tag or an outcome is empty.
  explicit HomodyneClass(std::vector<Outcome> outcomes);

  /// Phase shift theta = pi: even multiples of theta coincide, odd ones
  /// coincide. Covers tags 0..max_tag.
  static HomodyneClass theta_pi(int max_tag = 2);
  /// X-quadrature readout after rotating the probe back by theta: tags +k
  /// and -k coincide. Covers |tag| <= max_abs_tag.
  static HomodyneClass rotated_probe(int max_abs_tag = 1);

  const std::vector<Outcome>& outcomes() const { return outcomes_; }
  std::optional<std::size_t> class_of(int tag) const;

 private:
  std::vector<Outcome> outcomes_;
};

/// Polarizing beam splitter. H is transmitted (in1 -> out1, in2 -> out2),
/// V is reflected (in1 -> out2, in2 -> out1). No reflection phase.
/// Output modes must be fresh or reuse the input names.
StateVector apply_pbs(const StateVector& s, const ModeId& in1, const ModeId& in2,
                      const ModeId& out1, const ModeId& out2);

/// Half-wave plate at 90 degrees: H <-> V.
StateVector apply_hwp90(const StateVector& s, const ModeId& mode);

/// H -> (H + V)/sqrt2, V -> (H - V)/sqrt2 on a mode holding at most one
/// photon per ket; UnsupportedConfigurationError otherwise.
StateVector apply_hwp45(const StateVector& s, const ModeId& mode);

/// Same rotation applied to every boson in the mode (any occupation).
StateVector apply_hwp45_multiphoton(const StateVector& s, const ModeId& mode);

/// Sign flip on every V photon in the mode.
StateVector apply_phase_flip(const StateVector& s, const ModeId& mode);

/// Adds delta_tag * n(mode, pol) to each ket's probe tag.
StateVector apply_cross_kerr(const StateVector& s, const ModeId& mode, Polarization pol,
                             int delta_tag);

/// Rotates the probe: adds delta_tag to every ket's probe tag.
StateVector shift_probe(const StateVector& s, int delta_tag);

struct PostselectionResult {
  Branch pass;
  Branch fail;
};

/// Keeps kets with exactly one photon in each listed mode.
PostselectionResult postselect_one_photon_per_mode(const StateVector& s,
                                                   const std::vector<ModeId>& modes);

/// One branch per homodyne class, in class order. Branch states have their
/// probe tag reset to 0. Throws PartitionError for uncovered tags.
std::vector<Branch> homodyne_measure(const StateVector& s, const HomodyneClass& classes);

/// Ideal number-resolving readout of a single-photon mode behind a PBS:
/// branch 0 is "D1" (H), branch 1 is "D2" (V). The mode is absorbed.
std::vector<Branch> measure_polarization(const StateVector& s, const ModeId& mode);

/// Polarization-resolved photon counting on a mode: one branch per
/// (n_H, n_V) present, labelled "H<n_H>V<n_V>". Resolving polarization keeps
/// every branch pure. The mode is absorbed.
std::vector<Branch> measure_photon_number(const StateVector& s, const ModeId& mode);

}  // namespace ecpsim

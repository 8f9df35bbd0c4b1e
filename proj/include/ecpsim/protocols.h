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
#include <string>
#include <vector>

#include "ecpsim/elements.h"
#include "ecpsim/fockstate.h"

namespace ecpsim {

enum class Protocol { PBS2, QND2, PBS1_analytic, QND1_analytic };

/// How the cross-Kerr probe is read out.
///  ThetaPi:      theta = pi, so phases 0 and 2pi coincide; success on theta.
///  RotatedProbe: probe rotated back by theta, X-quadrature readout; success
///                on zero phase, +-theta indistinguishable.
enum class HomodyneScheme { ThetaPi, RotatedProbe };

enum class OutcomeClass {
  MaxEntangled_PhiPlus,
  MaxEntangled_PhiMinus_corrected,
  Recyclable_LessEntangled,
  Separable_Discard,
};

std::string to_string(Protocol p);
std::string to_string(HomodyneScheme s);
std::string to_string(OutcomeClass c);

struct IterationRecord {
  int index = 1;
  /// Success probability given that this round is reached.
  double conditional_success = 0.0;
  /// conditional_success times the probability of failing every earlier round.
  double unconditional_success = 0.0;
  PairCoefficients input_coeffs{1.0, 0.0};
  PairCoefficients ancilla_coeffs{1.0, 0.0};
};

/// A terminal branch of a protocol run.
struct Leaf {
  std::string path;
  double probability = 0.0;  // unconditional
  OutcomeClass outcome = OutcomeClass::Separable_Discard;  // of the raw, uncorrected state
  bool success = false;
  StateVector state;  // after any phase-flip correction
};

struct TraceStep {
  std::string label;
  double probability = 1.0;  // unconditional weight of the branch this step lives on
  StateVector state;
};

struct ProtocolReport {
  Protocol protocol = Protocol::PBS2;
  int n_parties = 2;
  std::optional<HomodyneScheme> scheme;
  std::vector<IterationRecord> iterations;
  double total_success = 0.0;
  /// Minimum fidelity of the corrected success states with the target
  /// GHZ/Bell state; 1 when no success branch has non-zero weight.
  double final_state_check = 1.0;
  std::vector<Leaf> leaves;
  std::vector<TraceStep> trace;
};

struct RunOptions {
  bool trace = false;
};

inline constexpr int kDefaultMaxIterations = 10;
inline constexpr int kMinParties = 2;
inline constexpr int kMaxParties = 8;

/// Alice's photon "a1" followed by "b1", "b2", ... for the other parties.
std::vector<ModeId> party_modes(int n_parties);
/// Output modes holding the concentrated state: "c1", "b1", "b2", ...
std::vector<ModeId> output_modes(int n_parties);
/// (|H...H> + |V...V>)/sqrt2 on output_modes(n_parties).
StateVector target_state(int n_parties);

ProtocolReport run_pbs2(const PairCoefficients& coeffs, const RunOptions& options = {});
ProtocolReport run_pbs2_ghz(const PairCoefficients& coeffs, int n_parties,
                            const RunOptions& options = {});

ProtocolReport run_qnd2(const PairCoefficients& coeffs,
                        int max_iterations = kDefaultMaxIterations,
                        HomodyneScheme scheme = HomodyneScheme::ThetaPi,
                        const RunOptions& options = {});
ProtocolReport run_qnd2_ghz(const PairCoefficients& coeffs, int n_parties, int max_iterations,
                            HomodyneScheme scheme = HomodyneScheme::ThetaPi,
                            const RunOptions& options = {});

/// Probe handling for one QND parity check under `scheme`.
HomodyneClass homodyne_classes(HomodyneScheme scheme, int max_photons_per_check = 2);
int probe_offset(HomodyneScheme scheme);
int success_tag(HomodyneScheme scheme);

/// Applies the cross-Kerr parity check to Alice's input "a1" and the rotated
/// ancilla "a3" (plus probe rotation for RotatedProbe).
StateVector apply_qnd_parity_check(const StateVector& s, HomodyneScheme scheme);

/// Throws ClassificationError for a state that is neither GHZ-like
/// (a|H..H> + b|V..V>) nor a product state.
OutcomeClass classify_outcome(const Branch& branch);

/// Sum of leaf probabilities.
double leaf_probability_sum(const ProtocolReport& report);

}  // namespace ecpsim

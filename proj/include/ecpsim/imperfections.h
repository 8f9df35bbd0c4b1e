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

#include <cstdint>
#include <optional>
#include <random>

#include "ecpsim/fockstate.h"
#include "ecpsim/protocols.h"

namespace ecpsim {

enum class SourceKind { SinglePhoton, Spdc };

/// Emission-number statistics of a triggered source, truncated at two
/// emissions. For SPDC the non-vacuum weight splits as 1 : gamma^2 between
/// one and two pairs, mirroring the |vac> + g|phi> + g^2|phi>^2 expansion.
struct SourceModel {
  double p0 = 0.0;
  double p1 = 1.0;
  double p2 = 0.0;
  SourceKind kind = SourceKind::SinglePhoton;
  double gamma_sq = 0.0;

  static SourceModel ideal() { return {}; }
  static SourceModel single_photon(double p0, double p2);
  static SourceModel spdc(double gamma_sq, double p0 = 0.0);

  /// Throws InvalidCircuitError on probabilities outside [0, 1], a sum
  /// differing from 1 by more than 1e-12, or negative gamma_sq.
  void validate() const;
};

struct DetectorModel {
  bool number_resolving = true;
  double efficiency = 1.0;

  static DetectorModel resolving(double efficiency = 1.0) { return {true, efficiency}; }
  static DetectorModel threshold(double efficiency = 1.0) { return {false, efficiency}; }

  void validate() const;
};

struct TrialTally {
  std::int64_t n_trials = 0;
  std::int64_t accepted = 0;
  std::int64_t true_success = 0;
  std::int64_t false_success = 0;
  /// Rejected trials in which at least one source emitted nothing.
  std::int64_t vacuum_rejects = 0;
  /// Sum of (1 - F) over accepted trials, F the fidelity of the kept state
  /// with the target Bell state.
  double accepted_infidelity = 0.0;

  TrialTally& operator+=(const TrialTally& other);
  friend bool operator==(const TrialTally&, const TrialTally&) = default;
};

int sample_photon_number(const SourceModel& model, std::mt19937_64& rng);

/// Linear-optics protocol under imperfect sources and detectors. The pair
/// photons c1, b1 and Alice's readout D1/D2 are all detected; acceptance
/// requires one photon on each (resolving) or a click on each with exactly
/// one of D1/D2 (threshold).
TrialTally run_mc_pbs2(const PairCoefficients& coeffs, const SourceModel& single_source,
                       const SourceModel& pair_source, const DetectorModel& detectors,
                       std::int64_t n_trials, std::uint64_t seed);

/// Cross-Kerr protocol with recycling. A fresh ancilla is drawn every round;
/// the pair is drawn once. Failed readouts end the trial.
TrialTally run_mc_qnd2(const PairCoefficients& coeffs, const SourceModel& single_source,
                       const SourceModel& pair_source, const DetectorModel& detectors,
                       int max_iterations, std::int64_t n_trials, std::uint64_t seed,
                       HomodyneScheme scheme = HomodyneScheme::ThetaPi);

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

/// Wilson score interval for k successes in n trials (z = 1.96 for 95%).
Interval wilson_interval(std::int64_t successes, std::int64_t n, double z = 1.959963984540054);

struct ErrorRateSummary {
  double acceptance_rate = 0.0;
  Interval acceptance_ci;
  /// accepted_infidelity / accepted. Empty when nothing was accepted.
  std::optional<double> error_fraction;
  /// false_success / accepted with its Wilson interval. Empty when nothing
  /// was accepted.
  std::optional<double> false_fraction;
  std::optional<Interval> false_fraction_ci;
  /// false_success / n_trials.
  double false_acceptance_rate = 0.0;
};

ErrorRateSummary error_rate_report(const TrialTally& tally);

/// Deterministic per-trial seed derived from the run seed and trial index.
std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial);

}  // namespace ecpsim

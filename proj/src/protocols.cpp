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

#include "ecpsim/protocols.h"

#include <algorithm>
#include <cmath>
#include <map>

#include "ecpsim/errors.h"

namespace ecpsim {
namespace {

const ModeId kAliceIn{"a1"};
const ModeId kAncilla{"a2"};
const ModeId kAncillaRotated{"a3"};
const ModeId kKept{"c1"};
const ModeId kMeasured{"c2"};

constexpr double kClassifyTol = 1e-9;

void check_parties(int n_parties) {
  if (n_parties < kMinParties || n_parties > kMaxParties) {
    throw CapacityError("n_parties must lie in [" + std::to_string(kMinParties) + ", " +
                        std::to_string(kMaxParties) + "], got " + std::to_string(n_parties));
  }
}

class Tracer {
 public:
  Tracer(bool enabled, std::vector<TraceStep>& sink) : enabled_(enabled), sink_(sink) {}
  void operator()(const std::string& label, double probability, const StateVector& s) {
    if (enabled_) sink_.push_back({label, probability, s});
  }

 private:
  bool enabled_;
  std::vector<TraceStep>& sink_;
};

// Magnitudes of the all-H and all-V amplitudes of a GHZ-form state.
PairCoefficients ghz_coefficients(const StateVector& s) {
  double h = 0.0, v = 0.0;
  for (const auto& [ket, amp] : s.terms()) {
    bool all_h = true, all_v = true;
    for (const auto& m : s.modes()) {
      all_h = all_h && ket.occupation(m, Polarization::H) == 1 && ket.occupation(m) == 1;
      all_v = all_v && ket.occupation(m, Polarization::V) == 1 && ket.occupation(m) == 1;
    }
    if (all_h) h = std::abs(amp);
    if (all_v) v = std::abs(amp);
  }
  return PairCoefficients::normalized(h, v);
}

// Local-configuration x rest-configuration amplitude table for one mode.
bool factorizes_at(const StateVector& s, const ModeId& mode) {
  std::map<BasisKet, std::map<BasisKet, Amplitude>> table;
  for (const auto& [ket, amp] : s.terms()) {
    BasisKet local;
    for (Polarization pol : {Polarization::H, Polarization::V}) {
      local = local.with_occupation(mode, pol, ket.occupation(mode, pol));
    }
    table[local][ket.without_mode(mode).with_probe_tag(0)] += amp;
  }
  // Rank one iff every 2x2 minor vanishes.
  std::vector<std::pair<const BasisKet*, const std::map<BasisKet, Amplitude>*>> rows;
  for (const auto& [k, row] : table) rows.emplace_back(&k, &row);
  std::set<BasisKet> cols;
  for (const auto& [k, row] : table)
    for (const auto& [c, a] : row) cols.insert(c);
  auto at = [](const std::map<BasisKet, Amplitude>& row, const BasisKet& c) {
    auto it = row.find(c);
    return it == row.end() ? Amplitude{} : it->second;
  };
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = i + 1; j < rows.size(); ++j) {
      for (auto c1 = cols.begin(); c1 != cols.end(); ++c1) {
        for (auto c2 = std::next(c1); c2 != cols.end(); ++c2) {
          const Amplitude minor = at(*rows[i].second, *c1) * at(*rows[j].second, *c2) -
                                  at(*rows[i].second, *c2) * at(*rows[j].second, *c1);
          if (std::abs(minor) > kClassifyTol) return false;
        }
      }
    }
  }
  return true;
}

// Shared post-processing of a three-photon-like branch: rotate "c2" by 45
// degrees, read it out, flip the phase of "c1" on D2.
struct Readout {
  Branch raw;           // before correction
  StateVector corrected;
};

std::vector<Readout> readout_and_correct(const StateVector& s) {
  std::vector<Readout> out;
  for (auto& b : measure_polarization(apply_hwp45(s, kMeasured), kMeasured)) {
    if (!b.state) continue;
    StateVector corrected = b.label == "D2" ? apply_phase_flip(*b.state, kKept) : *b.state;
    out.push_back({std::move(b), std::move(corrected)});
  }
  return out;
}

void finish_report(ProtocolReport& r) {
  r.total_success = 0.0;
  for (const auto& it : r.iterations) r.total_success += it.unconditional_success;
  const StateVector target = target_state(r.n_parties);
  r.final_state_check = 1.0;
  for (const auto& leaf : r.leaves) {
    if (leaf.success && leaf.probability > 0.0) {
      r.final_state_check = std::min(r.final_state_check, fidelity(target, leaf.state));
    }
  }
}

}  // namespace

std::string to_string(Protocol p) {
  switch (p) {
    case Protocol::PBS2: return "PBS2";
    case Protocol::QND2: return "QND2";
    case Protocol::PBS1_analytic: return "PBS1_analytic";
    case Protocol::QND1_analytic: return "QND1_analytic";
  }
  return "unknown";
}

std::string to_string(HomodyneScheme s) {
  return s == HomodyneScheme::ThetaPi ? "theta-pi" : "rotated-probe";
}

std::string to_string(OutcomeClass c) {
  switch (c) {
    case OutcomeClass::MaxEntangled_PhiPlus: return "MaxEntangled_PhiPlus";
    case OutcomeClass::MaxEntangled_PhiMinus_corrected: return "MaxEntangled_PhiMinus_corrected";
    case OutcomeClass::Recyclable_LessEntangled: return "Recyclable_LessEntangled";
    case OutcomeClass::Separable_Discard: return "Separable_Discard";
  }
  return "unknown";
}

std::vector<ModeId> party_modes(int n_parties) {
  check_parties(n_parties);
  std::vector<ModeId> modes{kAliceIn};
  for (int i = 1; i < n_parties; ++i) modes.emplace_back("b" + std::to_string(i));
  return modes;
}

std::vector<ModeId> output_modes(int n_parties) {
  auto modes = party_modes(n_parties);
  modes.front() = kKept;
  return modes;
}

StateVector target_state(int n_parties) {
  const double h = 1.0 / std::sqrt(2.0);
  return make_ghz_state(PairCoefficients(h, h), output_modes(n_parties));
}

HomodyneClass homodyne_classes(HomodyneScheme scheme, int max_photons_per_check) {
  return scheme == HomodyneScheme::ThetaPi
             ? HomodyneClass::theta_pi(max_photons_per_check)
             : HomodyneClass::rotated_probe(std::max(1, max_photons_per_check - 1));
}

int probe_offset(HomodyneScheme scheme) { return scheme == HomodyneScheme::ThetaPi ? 0 : -1; }

int success_tag(HomodyneScheme scheme) { return scheme == HomodyneScheme::ThetaPi ? 1 : 0; }

StateVector apply_qnd_parity_check(const StateVector& s, HomodyneScheme scheme) {
  StateVector out = apply_cross_kerr(s, kAliceIn, Polarization::H, 1);
  out = apply_cross_kerr(out, kAncillaRotated, Polarization::V, 1);
  if (const int offset = probe_offset(scheme); offset != 0) out = shift_probe(out, offset);
  return out;
}

OutcomeClass classify_outcome(const Branch& branch) {
  if (!branch.state) throw ClassificationError("branch has no state to classify");
  const StateVector& s = *branch.state;
  if (s.size() == 1) return OutcomeClass::Separable_Discard;

  if (s.size() == 2 && s.modes().size() >= 2) {
    BasisKet all_h, all_v;
    for (const auto& m : s.modes()) {
      all_h = all_h.with_occupation(m, Polarization::H, 1);
      all_v = all_v.with_occupation(m, Polarization::V, 1);
    }
    const Amplitude a = s.amplitude(all_h);
    const Amplitude b = s.amplitude(all_v);
    if (std::abs(a) > 0.0 && std::abs(b) > 0.0) {
      if (std::abs(std::abs(a) - std::abs(b)) > kClassifyTol) {
        return OutcomeClass::Recyclable_LessEntangled;
      }
      const Amplitude rel = b / a;
      if (std::abs(rel - 1.0) <= kClassifyTol) return OutcomeClass::MaxEntangled_PhiPlus;
      if (std::abs(rel + 1.0) <= kClassifyTol) return OutcomeClass::MaxEntangled_PhiMinus_corrected;
      throw ClassificationError("maximally entangled state with unsupported relative phase");
    }
  }

  bool product = true;
  for (const auto& m : s.modes()) product = product && factorizes_at(s, m);
  if (product) return OutcomeClass::Separable_Discard;
  throw ClassificationError("state is neither GHZ-form nor a product state");
}

double leaf_probability_sum(const ProtocolReport& report) {
  double total = 0.0;
  for (const auto& leaf : report.leaves) total += leaf.probability;
  return total;
}

// ---------------------------------------------------------------------------
// Linear-optics protocol

ProtocolReport run_pbs2_ghz(const PairCoefficients& coeffs, int n_parties,
                            const RunOptions& options) {
  ProtocolReport report;
  report.protocol = Protocol::PBS2;
  report.n_parties = n_parties;
  Tracer trace(options.trace, report.trace);

  const auto parties = party_modes(n_parties);
  StateVector s = tensor(make_ghz_state(coeffs, parties), make_single_photon(coeffs, kAncilla));
  trace("input", 1.0, s);
  s = relabel_mode(apply_hwp90(s, kAncilla), kAncilla, kAncillaRotated);
  trace("hwp90", 1.0, s);
  // a1's transmitted port is c2 and a3's is c1, so HV pairs bunch in c2 and
  // VH pairs bunch in c1.
  s = apply_pbs(s, kAliceIn, kAncillaRotated, kMeasured, kKept);
  trace("pbs", 1.0, s);

  std::vector<ModeId> checked{kKept, kMeasured};
  checked.insert(checked.end(), parties.begin() + 1, parties.end());
  auto [pass, fail] = postselect_one_photon_per_mode(s, checked);

  IterationRecord record;
  record.index = 1;
  record.conditional_success = pass.probability;
  record.unconditional_success = pass.probability;
  record.input_coeffs = coeffs;
  record.ancilla_coeffs = coeffs;
  report.iterations.push_back(record);

  if (pass.state) {
    trace("postselect/pass", pass.probability, *pass.state);
    for (auto& r : readout_and_correct(*pass.state)) {
      const double p = pass.probability * r.raw.probability;
      trace("postselect/pass/" + r.raw.label, p, r.corrected);
      report.leaves.push_back({"pass/" + r.raw.label, p, classify_outcome(r.raw), true,
                               std::move(r.corrected)});
    }
  }
  if (fail.state) {
    trace("postselect/fail", fail.probability, *fail.state);
    // The failed photons bunch in c1 or c2; counting them collapses Bob's side.
    for (const auto& in_c1 : measure_photon_number(*fail.state, kKept)) {
      if (!in_c1.state) continue;
      for (const auto& in_c2 : measure_photon_number(*in_c1.state, kMeasured)) {
        if (!in_c2.state) continue;
        const double p = fail.probability * in_c1.probability * in_c2.probability;
        const std::string path = "fail/c1:" + in_c1.label + "/c2:" + in_c2.label;
        trace(path, p, *in_c2.state);
        report.leaves.push_back({path, p, classify_outcome(in_c2), false, *in_c2.state});
      }
    }
  }
  finish_report(report);
  return report;
}

ProtocolReport run_pbs2(const PairCoefficients& coeffs, const RunOptions& options) {
  return run_pbs2_ghz(coeffs, 2, options);
}

// ---------------------------------------------------------------------------
// Cross-Kerr protocol with failure recycling

ProtocolReport run_qnd2_ghz(const PairCoefficients& coeffs, int n_parties, int max_iterations,
                            HomodyneScheme scheme, const RunOptions& options) {
  if (max_iterations < 1) throw InvalidCircuitError("max_iterations must be at least 1");
  ProtocolReport report;
  report.protocol = Protocol::QND2;
  report.n_parties = n_parties;
  report.scheme = scheme;
  Tracer trace(options.trace, report.trace);

  const auto parties = party_modes(n_parties);
  const HomodyneClass classes = homodyne_classes(scheme);
  const std::size_t success_class = *classes.class_of(success_tag(scheme));

  StateVector pair = make_ghz_state(coeffs, parties);
  PairCoefficients ancilla = coeffs;
  double reach = 1.0;  // probability that this round is reached

  for (int round = 1; round <= max_iterations; ++round) {
    const std::string prefix = "r" + std::to_string(round);
    IterationRecord record;
    record.index = round;
    record.input_coeffs = ghz_coefficients(pair);
    record.ancilla_coeffs = ancilla;

    StateVector s = tensor(pair, make_single_photon(ancilla, kAncilla));
    trace(prefix + "/input", reach, s);
    s = relabel_mode(apply_hwp90(s, kAncilla), kAncilla, kAncillaRotated);
    s = apply_qnd_parity_check(s, scheme);
    trace(prefix + "/qnd", reach, s);

    auto branches = homodyne_measure(s, classes);
    const bool last = round == max_iterations;
    double fail_probability = 0.0;
    std::optional<StateVector> recycled;

    for (std::size_t i = 0; i < branches.size(); ++i) {
      Branch& b = branches[i];
      const bool success = i == success_class;
      if (success) {
        record.conditional_success = b.probability;
        record.unconditional_success = reach * b.probability;
      } else {
        fail_probability += b.probability;
      }
      if (!b.state) continue;
      const std::string path = prefix + "/" + b.label;
      StateVector collapsed =
          relabel_mode(relabel_mode(*b.state, kAliceIn, kKept), kAncillaRotated, kMeasured);
      trace(path, reach * b.probability, collapsed);

      for (auto& r : readout_and_correct(collapsed)) {
        const double p = reach * b.probability * r.raw.probability;
        const std::string leaf_path = path + "/" + r.raw.label;
        trace(leaf_path, p, r.corrected);
        if (success || last) {
          report.leaves.push_back({leaf_path, p, classify_outcome(r.raw), success,
                                   std::move(r.corrected)});
          continue;
        }
        // Both detector outcomes leave the same corrected less-entangled pair.
        StateVector next = relabel_mode(r.corrected, kKept, kAliceIn);
        if (recycled && !equal_up_to_global_phase(*recycled, next, 1e-9)) {
          throw Error("failure branches disagree after correction in " + path);
        }
        recycled = std::move(next);
      }
    }
    report.iterations.push_back(record);
    if (last || !recycled) break;
    pair = std::move(*recycled);
    reach *= fail_probability;
    ancilla = ancilla.squared();
  }
  finish_report(report);
  return report;
}

ProtocolReport run_qnd2(const PairCoefficients& coeffs, int max_iterations, HomodyneScheme scheme,
                        const RunOptions& options) {
  return run_qnd2_ghz(coeffs, 2, max_iterations, scheme, options);
}

}  // namespace ecpsim

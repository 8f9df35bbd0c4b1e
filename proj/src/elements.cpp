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

#include "ecpsim/elements.h"

#include <cmath>
#include <functional>
#include <map>

#include "ecpsim/errors.h"

namespace ecpsim {
namespace {

void require_mode(const StateVector& s, const ModeId& mode) {
  if (!s.has_mode(mode)) throw InvalidCircuitError("mode not in circuit: " + mode.name());
}

// Rewrites each ket through `fn`, summing amplitudes that land on the same ket.
StateVector map_terms(const StateVector& s, std::set<ModeId> universe,
                      const std::function<void(const BasisKet&, Amplitude, StateVector::Terms&)>& fn) {
  StateVector::Terms out;
  for (const auto& [ket, amp] : s.terms()) fn(ket, amp, out);
  return StateVector(std::move(universe), std::move(out));
}

Branch make_branch(std::set<ModeId> universe, StateVector::Terms terms, double total,
                   std::string label) {
  StateVector sub(std::move(universe), std::move(terms));
  Branch b;
  b.label = std::move(label);
  b.probability = sub.norm_squared() / total;
  if (!sub.empty()) b.state = normalize(sub).state;
  return b;
}

double total_weight(const StateVector& s) {
  const double total = s.norm_squared();
  if (!(total > 0.0)) throw DegenerateStateError("measurement on the zero state");
  return total;
}

double factorial(int n) { return std::tgamma(n + 1.0); }

double binomial(int n, int k) { return factorial(n) / (factorial(k) * factorial(n - k)); }

}  // namespace

// ---------------------------------------------------------------------------
// HomodyneClass

HomodyneClass::HomodyneClass(std::vector<Outcome> outcomes) : outcomes_(std::move(outcomes)) {
  std::set<int> seen;
  for (const auto& o : outcomes_) {
    if (o.tags.empty()) throw PartitionError("homodyne class '" + o.label + "' is empty");
    for (int t : o.tags) {
      if (!seen.insert(t).second) {
        throw PartitionError("probe tag " + std::to_string(t) + " in two homodyne classes");
      }
    }
  }
}

HomodyneClass HomodyneClass::theta_pi(int max_tag) {
  Outcome odd{"phase-theta", {}};
  Outcome even{"phase-0/2pi", {}};
  for (int t = 0; t <= std::max(max_tag, 1); ++t) (t % 2 ? odd : even).tags.insert(t);
  return HomodyneClass({std::move(odd), std::move(even)});
}

HomodyneClass HomodyneClass::rotated_probe(int max_abs_tag) {
  std::vector<Outcome> out{{"phase-0", {0}}};
  for (int k = 1; k <= std::max(max_abs_tag, 1); ++k) {
    out.push_back({k == 1 ? "phase-pm-theta" : "phase-pm-" + std::to_string(k) + "theta", {-k, k}});
  }
  return HomodyneClass(std::move(out));
}

std::optional<std::size_t> HomodyneClass::class_of(int tag) const {
  for (std::size_t i = 0; i < outcomes_.size(); ++i) {
    if (outcomes_[i].tags.count(tag)) return i;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Passive elements

StateVector apply_pbs(const StateVector& s, const ModeId& in1, const ModeId& in2,
                      const ModeId& out1, const ModeId& out2) {
  require_mode(s, in1);
  require_mode(s, in2);
  if (in1 == in2) throw InvalidCircuitError("PBS input ports must differ");
  if (out1 == out2) throw InvalidCircuitError("PBS output ports must differ");
  std::set<ModeId> universe = s.modes();
  universe.erase(in1);
  universe.erase(in2);
  for (const auto& out : {out1, out2}) {
    if (universe.count(out)) {
      throw InvalidCircuitError("PBS output mode already in use: " + out.name());
    }
    universe.insert(out);
  }
  return map_terms(s, std::move(universe), [&](const BasisKet& ket, Amplitude amp, auto& out) {
    BasisKet k = ket.without_mode(in1).without_mode(in2);
    k = k.with_occupation(out1, Polarization::H, ket.occupation(in1, Polarization::H) +
                                                     k.occupation(out1, Polarization::H));
    k = k.with_occupation(out2, Polarization::H, ket.occupation(in2, Polarization::H) +
                                                     k.occupation(out2, Polarization::H));
    k = k.with_occupation(out2, Polarization::V, ket.occupation(in1, Polarization::V) +
                                                     k.occupation(out2, Polarization::V));
    k = k.with_occupation(out1, Polarization::V, ket.occupation(in2, Polarization::V) +
                                                     k.occupation(out1, Polarization::V));
    out[k] += amp;
  });
}

StateVector apply_hwp90(const StateVector& s, const ModeId& mode) {
  require_mode(s, mode);
  return map_terms(s, s.modes(), [&](const BasisKet& ket, Amplitude amp, auto& out) {
    const int h = ket.occupation(mode, Polarization::H);
    const int v = ket.occupation(mode, Polarization::V);
    out[ket.with_occupation(mode, Polarization::H, v).with_occupation(mode, Polarization::V, h)] +=
        amp;
  });
}

StateVector apply_hwp45_multiphoton(const StateVector& s, const ModeId& mode) {
  require_mode(s, mode);
  return map_terms(s, s.modes(), [&](const BasisKet& ket, Amplitude amp, auto& out) {
    const int nh = ket.occupation(mode, Polarization::H);
    const int nv = ket.occupation(mode, Polarization::V);
    const int n = nh + nv;
    // (a_H^+ + a_V^+)^nh (a_H^+ - a_V^+)^nv / sqrt(2^n nh! nv!) acting on |0>.
    const double prefactor = 1.0 / std::sqrt(std::pow(2.0, n) * factorial(nh) * factorial(nv));
    for (int j = 0; j <= nh; ++j) {
      for (int k = 0; k <= nv; ++k) {
        const int h_out = j + k;
        const int v_out = n - h_out;
        const double sign = ((nv - k) % 2) ? -1.0 : 1.0;
        const double c = prefactor * binomial(nh, j) * binomial(nv, k) * sign *
                         std::sqrt(factorial(h_out) * factorial(v_out));
        out[ket.with_occupation(mode, Polarization::H, h_out)
                .with_occupation(mode, Polarization::V, v_out)] += amp * c;
      }
    }
  });
}

StateVector apply_hwp45(const StateVector& s, const ModeId& mode) {
  require_mode(s, mode);
  for (const auto& [ket, amp] : s.terms()) {
    if (ket.occupation(mode) > 1) {
      throw UnsupportedConfigurationError("HWP45 on multi-photon occupation of " + mode.name());
    }
  }
  return apply_hwp45_multiphoton(s, mode);
}

StateVector apply_phase_flip(const StateVector& s, const ModeId& mode) {
  require_mode(s, mode);
  return map_terms(s, s.modes(), [&](const BasisKet& ket, Amplitude amp, auto& out) {
    out[ket] += (ket.occupation(mode, Polarization::V) % 2) ? -amp : amp;
  });
}

StateVector apply_cross_kerr(const StateVector& s, const ModeId& mode, Polarization pol,
                             int delta_tag) {
  require_mode(s, mode);
  return map_terms(s, s.modes(), [&](const BasisKet& ket, Amplitude amp, auto& out) {
    out[ket.with_probe_tag(ket.probe_tag() + delta_tag * ket.occupation(mode, pol))] += amp;
  });
}

StateVector shift_probe(const StateVector& s, int delta_tag) {
  return map_terms(s, s.modes(), [&](const BasisKet& ket, Amplitude amp, auto& out) {
    out[ket.with_probe_tag(ket.probe_tag() + delta_tag)] += amp;
  });
}

// ---------------------------------------------------------------------------
// Measurements

PostselectionResult postselect_one_photon_per_mode(const StateVector& s,
                                                   const std::vector<ModeId>& modes) {
  for (const auto& m : modes) require_mode(s, m);
  const double total = total_weight(s);
  StateVector::Terms pass, fail;
  for (const auto& [ket, amp] : s.terms()) {
    bool ok = true;
    for (const auto& m : modes) ok = ok && ket.occupation(m) == 1;
    (ok ? pass : fail).emplace(ket, amp);
  }
  return {make_branch(s.modes(), std::move(pass), total, "three-mode-pass"),
          make_branch(s.modes(), std::move(fail), total, "three-mode-fail")};
}

std::vector<Branch> homodyne_measure(const StateVector& s, const HomodyneClass& classes) {
  const double total = total_weight(s);
  std::vector<StateVector::Terms> groups(classes.outcomes().size());
  for (const auto& [ket, amp] : s.terms()) {
    auto idx = classes.class_of(ket.probe_tag());
    if (!idx) {
      throw PartitionError("probe tag " + std::to_string(ket.probe_tag()) +
                           " not covered by homodyne classes");
    }
    groups[*idx][ket.with_probe_tag(0)] += amp;
  }
  std::vector<Branch> out;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    out.push_back(make_branch(s.modes(), std::move(groups[i]), total, classes.outcomes()[i].label));
  }
  return out;
}

std::vector<Branch> measure_polarization(const StateVector& s, const ModeId& mode) {
  require_mode(s, mode);
  const double total = total_weight(s);
  std::set<ModeId> universe = s.modes();
  universe.erase(mode);
  StateVector::Terms d1, d2;
  for (const auto& [ket, amp] : s.terms()) {
    if (ket.occupation(mode) != 1) {
      throw UnsupportedConfigurationError("polarization readout needs exactly one photon in " +
                                          mode.name());
    }
    (ket.occupation(mode, Polarization::H) ? d1 : d2)[ket.without_mode(mode)] += amp;
  }
  return {make_branch(universe, std::move(d1), total, "D1"),
          make_branch(universe, std::move(d2), total, "D2")};
}

std::vector<Branch> measure_photon_number(const StateVector& s, const ModeId& mode) {
  require_mode(s, mode);
  const double total = total_weight(s);
  std::set<ModeId> universe = s.modes();
  universe.erase(mode);
  std::map<std::pair<int, int>, StateVector::Terms> groups;
  for (const auto& [ket, amp] : s.terms()) {
    const std::pair<int, int> key{ket.occupation(mode, Polarization::H),
                                  ket.occupation(mode, Polarization::V)};
    groups[key][ket.without_mode(mode)] += amp;
  }
  std::vector<Branch> out;
  for (auto& [count, terms] : groups) {
    out.push_back(make_branch(universe, std::move(terms), total,
                              "H" + std::to_string(count.first) + "V" + std::to_string(count.second)));
  }
  return out;
}

}  // namespace ecpsim

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

#include "ecpsim/serialize.h"

#include <cmath>
#include <sstream>

#include "ecpsim/errors.h"
#include "ecpsim/metrics.h"

namespace ecpsim {

using nlohmann::json;

namespace {

constexpr double kFormulaMismatchTol = 1e-12;

BasisKet parse_ket(const std::string& text) {
  BasisKet ket;
  std::stringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ',')) {
    const auto colon = token.find(':');
    if (colon == std::string::npos) throw Error("malformed ket token: " + token);
    const std::string name = token.substr(0, colon);
    const std::string value = token.substr(colon + 1);
    if (name == "probe") {
      ket = ket.with_probe_tag(std::stoi(value));
    } else if (value == "H" || value == "V") {
      const Polarization pol = value == "H" ? Polarization::H : Polarization::V;
      ket = ket.with_occupation(name, pol, ket.occupation(name, pol) + 1);
    } else {
      throw Error("malformed ket token: " + token);
    }
  }
  return ket;
}

}  // namespace

json to_json(const StateVector& s) {
  json modes = json::array();
  for (const auto& m : s.modes()) modes.push_back(m.name());
  json terms = json::object();
  for (const auto& [ket, amp] : s.terms()) terms[ket.to_string()] = {amp.real(), amp.imag()};
  return {{"modes", modes}, {"photon_number", s.photon_number()}, {"terms", terms}};
}

StateVector state_from_json(const json& j) {
  std::set<ModeId> modes;
  for (const auto& m : j.at("modes")) modes.insert(ModeId(m.get<std::string>()));
  StateVector::Terms terms;
  for (const auto& [key, value] : j.at("terms").items()) {
    terms[parse_ket(key)] = Amplitude{value.at(0).get<double>(), value.at(1).get<double>()};
  }
  return StateVector(std::move(modes), std::move(terms));
}

json to_json(const PairCoefficients& c) { return {{"alpha", c.alpha()}, {"beta", c.beta()}}; }

json to_json(const IterationRecord& r) {
  return {{"index", r.index},
          {"conditional_success", r.conditional_success},
          {"unconditional_success", r.unconditional_success},
          {"input_coeffs", to_json(r.input_coeffs)},
          {"ancilla_coeffs", to_json(r.ancilla_coeffs)}};
}

json to_json(const ProtocolReport& report, bool include_trace) {
  json iterations = json::array();
  bool any_mismatch = false;
  for (const auto& it : report.iterations) {
    json row = to_json(it);
    if (report.protocol == Protocol::QND2 && !report.iterations.empty()) {
      const PairCoefficients& c0 = report.iterations.front().input_coeffs;
      const double closed = p_n_closed_form(c0, it.index);
      const bool mismatch = std::abs(closed - it.unconditional_success) > kFormulaMismatchTol;
      any_mismatch = any_mismatch || mismatch;
      row["p_n_closed_form"] = closed;
      row["p_n_recursion"] = p_n_derived(c0, it.index);
      row["closed_form_mismatch"] = mismatch;
    }
    iterations.push_back(std::move(row));
  }
  json leaves = json::array();
  for (const auto& leaf : report.leaves) {
    leaves.push_back({{"path", leaf.path},
                      {"probability", leaf.probability},
                      {"outcome", to_string(leaf.outcome)},
                      {"success", leaf.success}});
  }
  json out = {{"protocol", to_string(report.protocol)},
              {"n_parties", report.n_parties},
              {"iterations", iterations},
              {"total_success", report.total_success},
              {"final_state_check", report.final_state_check},
              {"leaf_probability_sum", leaf_probability_sum(report)},
              {"leaves", leaves}};
  if (report.scheme) out["scheme"] = to_string(*report.scheme);
  if (report.protocol == Protocol::QND2) out["closed_form_mismatch"] = any_mismatch;
  if (include_trace) {
    json trace = json::array();
    for (const auto& step : report.trace) {
      trace.push_back(
          {{"label", step.label}, {"probability", step.probability}, {"state", to_json(step.state)}});
    }
    out["trace"] = std::move(trace);
  }
  return out;
}

json to_json(const SourceModel& m) {
  return {{"kind", m.kind == SourceKind::Spdc ? "spdc" : "single_photon"},
          {"p0", m.p0},
          {"p1", m.p1},
          {"p2", m.p2},
          {"gamma_sq", m.gamma_sq}};
}

json to_json(const DetectorModel& d) {
  return {{"number_resolving", d.number_resolving}, {"efficiency", d.efficiency}};
}

json to_json(const TrialTally& t) {
  return {{"n_trials", t.n_trials},
          {"accepted", t.accepted},
          {"true_success", t.true_success},
          {"false_success", t.false_success},
          {"vacuum_rejects", t.vacuum_rejects},
          {"accepted_infidelity", t.accepted_infidelity}};
}

json to_json(const ErrorRateSummary& s) {
  auto interval = [](const Interval& i) { return json::array({i.lo, i.hi}); };
  json out = {{"acceptance_rate", s.acceptance_rate},
              {"acceptance_ci95", interval(s.acceptance_ci)},
              {"false_acceptance_rate", s.false_acceptance_rate}};
  out["error_fraction"] = s.error_fraction ? json(*s.error_fraction) : json(nullptr);
  out["false_fraction"] = s.false_fraction ? json(*s.false_fraction) : json(nullptr);
  out["false_fraction_ci95"] = s.false_fraction_ci ? interval(*s.false_fraction_ci) : json(nullptr);
  return out;
}

}  // namespace ecpsim

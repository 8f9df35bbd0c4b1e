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

#include "json.hpp"

#include "ecpsim/fockstate.h"
#include "ecpsim/imperfections.h"
#include "ecpsim/protocols.h"

namespace ecpsim {

/// {"modes": [...], "photon_number": n, "terms": {"a1:H,b1:H": [re, im], ...}}
nlohmann::json to_json(const StateVector& s);
StateVector state_from_json(const nlohmann::json& j);

nlohmann::json to_json(const PairCoefficients& c);
nlohmann::json to_json(const IterationRecord& r);
/// Adds per-round closed-form values and flags rounds where the literal
/// closed form departs from the circuit probability.
nlohmann::json to_json(const ProtocolReport& report, bool include_trace = false);

nlohmann::json to_json(const SourceModel& m);
nlohmann::json to_json(const DetectorModel& d);
nlohmann::json to_json(const TrialTally& t);
nlohmann::json to_json(const ErrorRateSummary& s);

}  // namespace ecpsim

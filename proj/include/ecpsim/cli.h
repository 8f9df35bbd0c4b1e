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

#include <iosfwd>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "ecpsim/protocols.h"

namespace ecpsim {

enum class SweepVariant { ClosedForm, Derived, Both };

/// An alpha grid plus which columns to fill. Unselected columns stay empty.
struct SweepConfig {
  double alpha_min = 0.01;
  double alpha_max = 0.99;
  int steps = 99;
  std::set<Protocol> protocols{Protocol::PBS1_analytic, Protocol::QND1_analytic, Protocol::PBS2,
                               Protocol::QND2};
  int n_max = kDefaultMaxIterations;
  SweepVariant variant = SweepVariant::Both;
  /// Adds alpha = 1/sqrt2 to the grid, where several curves peak.
  bool include_symmetric_point = false;

  /// Throws InvalidCircuitError.
  void validate() const;
};

/// "fig4", "fig5" or "fig6". Throws InvalidCircuitError for anything else.
SweepConfig preset_config(const std::string& name);

std::vector<double> sweep_grid(const SweepConfig& config);

inline constexpr const char* kSweepHeader =
    "alpha,E0,p1,total_p_paper,total_p_derived,eta_pbs1,eta_qnd1,eta_pbs2,eta_qnd2,eta_qnd2_limit";

/// Header plus one row per grid point, 12 significant digits, LF endings.
std::string sweep_csv(const SweepConfig& config);
nlohmann::json sweep_metadata(const SweepConfig& config, const std::string& preset);

/// Exit codes: 0 ok, 2 invalid arguments, 3 unwritable output.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ecpsim

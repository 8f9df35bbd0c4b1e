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

#include "ecpsim/cli.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"

#include "ecpsim/errors.h"
#include "ecpsim/imperfections.h"
#include "ecpsim/metrics.h"
#include "ecpsim/parallel.h"
#include "ecpsim/serialize.h"

namespace ecpsim {

using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 2;
constexpr int kExitUnwritable = 3;

// Raised for output paths we cannot open; maps to exit 3.
struct UnwritableOutput : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

PairCoefficients checked_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InvalidCircuitError("alpha must lie in (0, 1), got " + fmt12(alpha));
  }
  return PairCoefficients::from_alpha(alpha);
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw UnwritableOutput("cannot open " + path + " for writing");
  f << contents;
  f.close();
  if (!f) throw UnwritableOutput("failed writing " + path);
}

const std::map<std::string, Protocol> kProtocolNames{
    {"pbs1", Protocol::PBS1_analytic},
    {"qnd1", Protocol::QND1_analytic},
    {"pbs2", Protocol::PBS2},
    {"qnd2", Protocol::QND2},
};

const std::map<std::string, HomodyneScheme> kSchemeNames{
    {"theta-pi", HomodyneScheme::ThetaPi},
    {"rotated", HomodyneScheme::RotatedProbe},
};

const std::map<std::string, SweepVariant> kVariantNames{
    {"paper", SweepVariant::ClosedForm},
    {"derived", SweepVariant::Derived},
    {"both", SweepVariant::Both},
};

std::string variant_name(SweepVariant v) {
  for (const auto& [name, value] : kVariantNames) {
    if (value == v) return name;
  }
  return "both";
}

std::string sweep_row(const SweepConfig& config, double alpha) {
  const PairCoefficients c = PairCoefficients::from_alpha(alpha);
  const auto has = [&](Protocol p) { return config.protocols.count(p) != 0; };
  const bool closed_form = config.variant != SweepVariant::Derived;
  const bool derived = config.variant != SweepVariant::ClosedForm;

  std::string row = fmt12(alpha);
  const auto cell = [&row](bool present, auto&& value) {
    row += ',';
    if (present) row += fmt12(value());
  };
  cell(true, [&] { return von_neumann_entropy(c); });
  cell(true, [&] { return p_n_derived(c, 1); });
  cell(has(Protocol::QND2) && closed_form, [&] { return total_p(c, config.n_max, TotalVariant::ClosedForm); });
  cell(has(Protocol::QND2) && derived,
       [&] { return total_p(c, config.n_max, TotalVariant::Derived); });
  cell(has(Protocol::PBS1_analytic), [&] { return eta_pbs1(c); });
  cell(has(Protocol::QND1_analytic), [&] { return eta_qnd1(c); });
  cell(has(Protocol::PBS2), [&] { return eta_pbs2(c); });
  cell(has(Protocol::QND2), [&] { return eta_qnd2(c); });
  cell(has(Protocol::QND2) && derived, [&] { return eta_qnd2_limit(c, config.n_max); });
  row += '\n';
  return row;
}

json mc_config_echo(const std::string& protocol, const PairCoefficients& c,
                    const SourceModel& single, const SourceModel& pair,
                    const DetectorModel& detectors, int n_max, HomodyneScheme scheme,
                    std::int64_t trials, std::uint64_t seed) {
  json cfg = {{"protocol", protocol},
              {"alpha", c.alpha()},
              {"beta", c.beta()},
              {"single_source", to_json(single)},
              {"pair_source", to_json(pair)},
              {"detectors", to_json(detectors)},
              {"trials", trials},
              {"seed", seed},
              {"double_emission_model",
               "two ancilla photons are independent bosons in one mode with the same "
               "polarization state; a double pair emission is the squared pair creation "
               "operator"}};
  if (protocol == "qnd2") {
    cfg["n_max"] = n_max;
    cfg["scheme"] = to_string(scheme);
  }
  return cfg;
}

}  // namespace

void SweepConfig::validate() const {
  if (!(alpha_min > 0.0 && alpha_min < 1.0 && alpha_max > 0.0 && alpha_max < 1.0)) {
    throw InvalidCircuitError("sweep endpoints must lie in (0, 1)");
  }
  if (!(alpha_min < alpha_max)) throw InvalidCircuitError("alpha_min must be below alpha_max");
  if (steps < 2) throw InvalidCircuitError("steps must be at least 2");
  if (n_max < 1) throw InvalidCircuitError("n_max must be at least 1");
  if (protocols.empty()) throw InvalidCircuitError("no protocols selected");
}

SweepConfig preset_config(const std::string& name) {
  if (name != "fig4" && name != "fig5" && name != "fig6") {
    throw InvalidCircuitError("unknown preset: " + name);
  }
  SweepConfig config;
  config.include_symmetric_point = true;
  return config;
}

std::vector<double> sweep_grid(const SweepConfig& config) {
  config.validate();
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(config.steps) + 1);
  const double step = (config.alpha_max - config.alpha_min) / (config.steps - 1);
  for (int i = 0; i < config.steps; ++i) {
    // Rounded to 12 digits so printed values and computed rows agree.
    const double raw = i + 1 == config.steps ? config.alpha_max : config.alpha_min + i * step;
    grid.push_back(std::stod(fmt12(raw)));
  }
  if (config.include_symmetric_point) {
    const double sym = 1.0 / std::sqrt(2.0);
    const bool inside = sym > config.alpha_min && sym < config.alpha_max;
    const bool present = std::any_of(grid.begin(), grid.end(),
                                     [&](double a) { return std::abs(a - sym) < 1e-12; });
    if (inside && !present) {
      grid.insert(std::upper_bound(grid.begin(), grid.end(), sym), sym);
    }
  }
  return grid;
}

std::string sweep_csv(const SweepConfig& config) {
  const std::vector<double> grid = sweep_grid(config);
  std::vector<std::string> rows(grid.size());
  parallel_for(grid.size(), [&](std::size_t begin, std::size_t end, std::size_t) {
    for (std::size_t i = begin; i < end; ++i) rows[i] = sweep_row(config, grid[i]);
  });
  std::string csv = std::string(kSweepHeader) + "\n";
  for (const auto& r : rows) csv += r;
  return csv;
}

json sweep_metadata(const SweepConfig& config, const std::string& preset) {
  json protocols = json::array();
  for (const auto& p : config.protocols) protocols.push_back(to_string(p));
  json meta = {{"columns", kSweepHeader},
               {"alpha_min", config.alpha_min},
               {"alpha_max", config.alpha_max},
               {"steps", config.steps},
               {"rows", sweep_grid(config).size()},
               {"include_symmetric_point", config.include_symmetric_point},
               {"protocols", protocols},
               {"n_max", config.n_max},
               {"variant", variant_name(config.variant)},
               {"number_format", "%.12g"},
               {"notes",
                "total_p_paper evaluates the closed-form iterated probability; "
                "total_p_derived sums the circuit recursion. They agree for the first two "
                "rounds only."}};
  if (!preset.empty()) meta["preset"] = preset;
  return meta;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Single-photon-assisted entanglement concentration simulator", "ecpsim"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "Run one protocol exactly and print a JSON report");
  std::string run_protocol = "pbs2";
  double run_alpha = 0.0;
  int run_n_max = kDefaultMaxIterations;
  int run_parties = 2;
  std::string run_scheme = "theta-pi";
  bool run_trace = false;
  run->add_option("--protocol", run_protocol, "pbs2 or qnd2")
      ->check(CLI::IsMember({"pbs2", "qnd2"}));
  run->add_option("--alpha", run_alpha, "Coefficient of |HH>, in (0, 1)")->required();
  run->add_option("--n-max", run_n_max, "Maximum QND rounds")->check(CLI::PositiveNumber);
  run->add_option("--parties", run_parties, "Number of parties sharing the GHZ state");
  run->add_option("--scheme", run_scheme, "Homodyne scheme: theta-pi or rotated")
      ->check(CLI::IsMember({"theta-pi", "rotated"}));
  run->add_flag("--trace", run_trace, "Include every intermediate state");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Tabulate closed-form metrics over an alpha grid");
  std::string preset;
  SweepConfig sweep_cfg;
  std::vector<std::string> sweep_protocols;
  std::string sweep_variant = "both";
  std::string sweep_out;
  sweep->add_option("--preset", preset, "fig4, fig5 or fig6")
      ->check(CLI::IsMember({"fig4", "fig5", "fig6"}));
  auto* amin = sweep->add_option("--alpha-min", sweep_cfg.alpha_min);
  auto* amax = sweep->add_option("--alpha-max", sweep_cfg.alpha_max);
  auto* steps = sweep->add_option("--steps", sweep_cfg.steps);
  auto* sprot = sweep->add_option("--protocols", sweep_protocols, "Subset of pbs1,qnd1,pbs2,qnd2")
                    ->delimiter(',')
                    ->check(CLI::IsMember({"pbs1", "qnd1", "pbs2", "qnd2"}));
  auto* snmax = sweep->add_option("--n-max", sweep_cfg.n_max);
  auto* svar = sweep->add_option("--variant", sweep_variant)
                   ->check(CLI::IsMember({"paper", "derived", "both"}));
  sweep->add_option("--out", sweep_out, "CSV path; a .meta.json sidecar is written next to it");
  for (auto* opt : {amin, amax, steps, sprot, snmax, svar}) opt->excludes("--preset");

  // mc
  auto* mc = app.add_subcommand("mc", "Monte Carlo run under imperfect sources and detectors");
  std::string mc_protocol = "pbs2";
  double mc_alpha = 0.0;
  double mc_p0 = 0.0;
  double mc_p2 = 0.0;
  double mc_gamma_sq = 0.0;
  double mc_pair_p0 = 0.0;
  double mc_pair_p2 = 0.0;
  std::string mc_detectors = "resolving";
  double mc_efficiency = 1.0;
  std::int64_t mc_trials = 100000;
  std::uint64_t mc_seed = 1;
  int mc_n_max = kDefaultMaxIterations;
  std::string mc_scheme = "theta-pi";
  std::string mc_out;
  mc->add_option("--protocol", mc_protocol)->check(CLI::IsMember({"pbs2", "qnd2"}));
  mc->add_option("--alpha", mc_alpha)->required();
  mc->add_option("--p0", mc_p0, "Ancilla source vacuum probability");
  auto* p2 = mc->add_option("--p2", mc_p2, "Ancilla source double-emission probability");
  mc->add_option("--gamma-sq", mc_gamma_sq, "Ancilla is an SPDC source with this pair ratio")
      ->excludes(p2);
  mc->add_option("--pair-p0", mc_pair_p0, "Pair source vacuum probability");
  mc->add_option("--pair-p2", mc_pair_p2, "Pair source double-emission probability");
  mc->add_option("--detectors", mc_detectors)->check(CLI::IsMember({"resolving", "threshold"}));
  mc->add_option("--efficiency", mc_efficiency, "Detector efficiency in [0, 1]");
  mc->add_option("--trials", mc_trials);
  mc->add_option("--seed", mc_seed);
  mc->add_option("--n-max", mc_n_max)->check(CLI::PositiveNumber);
  mc->add_option("--scheme", mc_scheme)->check(CLI::IsMember({"theta-pi", "rotated"}));
  mc->add_option("--out", mc_out, "JSON path (default: standard output)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (run->parsed()) {
      const PairCoefficients c = checked_alpha(run_alpha);
      const RunOptions opts{run_trace};
      const ProtocolReport report =
          run_protocol == "pbs2"
              ? run_pbs2_ghz(c, run_parties, opts)
              : run_qnd2_ghz(c, run_parties, run_n_max, kSchemeNames.at(run_scheme), opts);
      out << to_json(report, run_trace).dump(2) << '\n';
      return kExitOk;
    }

    if (sweep->parsed()) {
      SweepConfig cfg = sweep_cfg;
      if (!preset.empty()) {
        cfg = preset_config(preset);
      } else {
        cfg.variant = kVariantNames.at(sweep_variant);
        if (!sweep_protocols.empty()) {
          cfg.protocols.clear();
          for (const auto& p : sweep_protocols) cfg.protocols.insert(kProtocolNames.at(p));
        }
      }
      const std::string csv = sweep_csv(cfg);
      if (sweep_out.empty()) {
        out << csv;
      } else {
        write_file(sweep_out, csv);
        write_file(sweep_out + ".meta.json", sweep_metadata(cfg, preset).dump(2) + "\n");
      }
      return kExitOk;
    }

    if (mc->parsed()) {
      const PairCoefficients c = checked_alpha(mc_alpha);
      if (mc_trials < 1) throw InvalidCircuitError("--trials must be at least 1");
      if (mc_gamma_sq < 0.0) throw InvalidCircuitError("--gamma-sq must be non-negative");
      const SourceModel single = mc->count("--gamma-sq") > 0
                                     ? SourceModel::spdc(mc_gamma_sq, mc_p0)
                                     : SourceModel::single_photon(mc_p0, mc_p2);
      const SourceModel pair = SourceModel::single_photon(mc_pair_p0, mc_pair_p2);
      const DetectorModel detectors = mc_detectors == "resolving"
                                          ? DetectorModel::resolving(mc_efficiency)
                                          : DetectorModel::threshold(mc_efficiency);
      detectors.validate();
      const HomodyneScheme scheme = kSchemeNames.at(mc_scheme);

      TrialTally tally;
      double ideal = 0.0;
      if (mc_protocol == "pbs2") {
        tally = run_mc_pbs2(c, single, pair, detectors, mc_trials, mc_seed);
        ideal = p_n_derived(c, 1);
      } else {
        tally = run_mc_qnd2(c, single, pair, detectors, mc_n_max, mc_trials, mc_seed, scheme);
        ideal = total_p(c, mc_n_max, TotalVariant::Derived);
      }
      const json doc = {
          {"config", mc_config_echo(mc_protocol, c, single, pair, detectors, mc_n_max, scheme,
                                    mc_trials, mc_seed)},
          {"tally", to_json(tally)},
          {"summary", to_json(error_rate_report(tally))},
          {"ideal_acceptance", ideal}};
      if (mc_out.empty()) {
        out << doc.dump(2) << '\n';
      } else {
        write_file(mc_out, doc.dump(2) + "\n");
      }
      return kExitOk;
    }
  } catch (const UnwritableOutput& e) {
    err << "error: " << e.what() << '\n';
    return kExitUnwritable;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
  return kExitInvalid;
}

}  // namespace ecpsim

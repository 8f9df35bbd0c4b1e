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

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ecpsim/serialize.h"

namespace ecpsim {
namespace {

using nlohmann::json;

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult cli(std::vector<std::string> args) {
  args.insert(args.begin(), "ecpsim");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

std::size_t column(const std::vector<std::string>& header, const std::string& name) {
  return static_cast<std::size_t>(std::find(header.begin(), header.end(), name) - header.begin());
}

// The data row whose alpha is closest to `alpha`.
const std::vector<std::string>& row_near(const std::vector<std::vector<std::string>>& rows,
                                         double alpha) {
  std::size_t best = 1;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (std::abs(std::stod(rows[i][0]) - alpha) < std::abs(std::stod(rows[best][0]) - alpha)) {
      best = i;
    }
  }
  return rows[best];
}

class TempDir {
 public:
  TempDir() {
    path_ = std::filesystem::temp_directory_path() /
            ("ecpsim_cli_test_" + std::to_string(::getpid()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

// --- run --------------------------------------------------------------------

TEST(CliRunTest, Pbs2NearSymmetricPoint) {
  CliResult r = cli({"run", "--protocol", "pbs2", "--alpha", "0.7071"});
  ASSERT_EQ(r.code, 0) << r.err;
  json j = json::parse(r.out);
  EXPECT_NEAR(j["total_success"].get<double>(), 0.5, 1e-6);
  EXPECT_EQ(j["protocol"], "PBS2");
  EXPECT_NEAR(j["leaf_probability_sum"].get<double>(), 1.0, 1e-12);
}

TEST(CliRunTest, Qnd2ReportsEveryRound) {
  CliResult r = cli({"run", "--protocol", "qnd2", "--alpha", "0.6", "--n-max", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  json j = json::parse(r.out);
  ASSERT_EQ(j["iterations"].size(), 3u);
  EXPECT_EQ(j["scheme"], "theta-pi");
  EXPECT_FALSE(j["iterations"][1]["closed_form_mismatch"].get<bool>());
  EXPECT_TRUE(j["iterations"][2]["closed_form_mismatch"].get<bool>());
}

TEST(CliRunTest, TraceRoundTripsStates) {
  CliResult r = cli({"run", "--protocol", "qnd2", "--alpha", "0.6", "--n-max", "2", "--scheme",
                     "rotated", "--trace", "--parties", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  json j = json::parse(r.out);
  ASSERT_TRUE(j.contains("trace"));
  ASSERT_FALSE(j["trace"].empty());
  for (const auto& step : j["trace"]) {
    StateVector s = state_from_json(step["state"]);
    EXPECT_TRUE(s.is_normalized(1e-9)) << step["label"];
    EXPECT_EQ(to_json(s), step["state"]);
  }
  bool saw_probe = false;
  for (const auto& step : j["trace"]) {
    for (const auto& [ket, amp] : step["state"]["terms"].items()) {
      saw_probe = saw_probe || ket.find("probe:") != std::string::npos;
    }
  }
  EXPECT_TRUE(saw_probe);
}

TEST(CliRunTest, InvalidArguments) {
  CliResult bad_alpha = cli({"run", "--alpha", "1.5"});
  EXPECT_EQ(bad_alpha.code, 2);
  EXPECT_NE(bad_alpha.err.find("alpha"), std::string::npos);
  EXPECT_EQ(cli({"run", "--alpha", "0"}).code, 2);
  EXPECT_EQ(cli({"run", "--alpha", "0.6", "--parties", "9"}).code, 2);
  EXPECT_EQ(cli({"run", "--alpha", "0.6", "--protocol", "pbs9"}).code, 2);
  EXPECT_EQ(cli({"run"}).code, 2);
  EXPECT_EQ(cli({"bogus"}).code, 2);
  EXPECT_EQ(cli({}).code, 2);
  EXPECT_EQ(cli({"--help"}).code, 0);
}

// --- sweep ------------------------------------------------------------------

TEST(CliSweepTest, TwoStepsGiveTwoRows) {
  CliResult r = cli({"sweep", "--alpha-min", "0.2", "--alpha-max", "0.8", "--steps", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto rows = parse_csv(r.out);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), kSweepHeader);
  EXPECT_EQ(rows[1][0], "0.2");
  EXPECT_EQ(rows[2][0], "0.8");
}

TEST(CliSweepTest, Fig4PresetSymmetricRow) {
  TempDir dir;
  const auto path = dir / "fig4.csv";
  CliResult r = cli({"sweep", "--preset", "fig4", "--out", path.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  auto rows = parse_csv(read_file(path));
  EXPECT_EQ(rows.size(), 101u);  // header, 99 grid points, 1/sqrt2
  const auto& row = row_near(rows, 0.70711);
  EXPECT_NEAR(std::stod(row[column(rows[0], "total_p_derived")]), 0.99902, 5e-6);
  EXPECT_NEAR(std::stod(row[column(rows[0], "total_p_derived")]), 1 - std::ldexp(1.0, -10), 1e-12);
}

TEST(CliSweepTest, Fig5PresetSymmetricRow) {
  TempDir dir;
  const auto path = dir / "fig5.csv";
  ASSERT_EQ(cli({"sweep", "--preset", "fig5", "--out", path.string()}).code, 0);
  auto rows = parse_csv(read_file(path));
  const auto& row = row_near(rows, 0.70711);
  // At a maximally entangled input one round of PBS2 succeeds half the time
  // and keeps nothing otherwise, so E_c / E_0 = 1/2; the cross-Kerr
  // protocol keeps a maximally entangled pair either way.
  EXPECT_NEAR(std::stod(row[column(rows[0], "eta_pbs2")]), 0.5, 1e-11);
  EXPECT_NEAR(std::stod(row[column(rows[0], "eta_pbs1")]), 0.25, 1e-11);
  EXPECT_NEAR(std::stod(row[column(rows[0], "eta_qnd2")]), 1.0, 1e-11);
  EXPECT_NEAR(std::stod(row[column(rows[0], "eta_qnd1")]), 0.5, 1e-11);
}

TEST(CliSweepTest, OutputIsDeterministicAndSidecarHasNoTimestamp) {
  TempDir dir;
  const auto a = dir / "a.csv";
  const auto b = dir / "b.csv";
  setenv("ECP_SIM_THREADS", "1", 1);
  ASSERT_EQ(cli({"sweep", "--preset", "fig6", "--out", a.string()}).code, 0);
  setenv("ECP_SIM_THREADS", "5", 1);
  ASSERT_EQ(cli({"sweep", "--preset", "fig6", "--out", b.string()}).code, 0);
  unsetenv("ECP_SIM_THREADS");
  const std::string csv = read_file(a);
  EXPECT_EQ(csv, read_file(b));
  EXPECT_EQ(csv.find('\r'), std::string::npos);
  const std::string meta = read_file(a.string() + ".meta.json");
  EXPECT_EQ(meta, read_file(b.string() + ".meta.json"));
  json j = json::parse(meta);
  EXPECT_EQ(j["preset"], "fig6");
  EXPECT_EQ(j["n_max"], 10);
  EXPECT_EQ(meta.find("time"), std::string::npos);
}

TEST(CliSweepTest, ColumnSelection) {
  CliResult r = cli({"sweep", "--alpha-min", "0.3", "--alpha-max", "0.6", "--steps", "3",
                     "--protocols", "pbs2", "--variant", "paper"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto rows = parse_csv(r.out);
  const auto& h = rows[0];
  EXPECT_FALSE(rows[1][column(h, "eta_pbs2")].empty());
  EXPECT_TRUE(rows[1][column(h, "eta_qnd2")].empty());
  EXPECT_TRUE(rows[1][column(h, "total_p_derived")].empty());
  EXPECT_EQ(rows[1].size(), h.size());
}

TEST(CliSweepTest, Errors) {
  EXPECT_EQ(cli({"sweep", "--preset", "fig4", "--out", "/nonexistent-dir/x.csv"}).code, 3);
  EXPECT_EQ(cli({"sweep", "--alpha-min", "0.8", "--alpha-max", "0.2"}).code, 2);
  EXPECT_EQ(cli({"sweep", "--steps", "1"}).code, 2);
  EXPECT_EQ(cli({"sweep", "--alpha-min", "0"}).code, 2);
  EXPECT_EQ(cli({"sweep", "--preset", "fig7"}).code, 2);
  EXPECT_EQ(cli({"sweep", "--preset", "fig4", "--steps", "5"}).code, 2);
}

// --- mc ---------------------------------------------------------------------

TEST(CliMcTest, IdealPbs2Acceptance) {
  CliResult r = cli({"mc", "--protocol", "pbs2", "--alpha", "0.70711", "--trials", "100000",
                     "--seed", "7"});
  ASSERT_EQ(r.code, 0) << r.err;
  json j = json::parse(r.out);
  const double acc = j["summary"]["acceptance_rate"].get<double>();
  EXPECT_NEAR(acc, 0.5, 3 * std::sqrt(0.25 / 1e5));
  EXPECT_EQ(j["config"]["seed"], 7);
  EXPECT_EQ(j["tally"]["false_success"], 0);
  EXPECT_TRUE(j["config"].contains("double_emission_model"));
  // Same seed, same bytes.
  EXPECT_EQ(r.out, cli({"mc", "--protocol", "pbs2", "--alpha", "0.70711", "--trials", "100000",
                        "--seed", "7"})
                       .out);
}

TEST(CliMcTest, VacuumScaling) {
  CliResult r = cli({"mc", "--alpha", "0.6", "--p0", "0.14", "--trials", "100000"});
  ASSERT_EQ(r.code, 0) << r.err;
  json j = json::parse(r.out);
  const double p = 0.86 * j["ideal_acceptance"].get<double>();
  EXPECT_NEAR(j["summary"]["acceptance_rate"].get<double>(), p, 3 * std::sqrt(p * (1 - p) / 1e5));
}

TEST(CliMcTest, WritesFileAndRejectsBadInput) {
  TempDir dir;
  const auto path = dir / "mc.json";
  ASSERT_EQ(cli({"mc", "--protocol", "qnd2", "--alpha", "0.6", "--trials", "2000",
                 "--detectors", "threshold", "--gamma-sq", "1e-4", "--out", path.string()})
                .code,
            0);
  json j = json::parse(read_file(path));
  EXPECT_EQ(j["config"]["single_source"]["kind"], "spdc");
  EXPECT_EQ(j["tally"]["n_trials"], 2000);

  EXPECT_EQ(cli({"mc", "--alpha", "0.6", "--trials", "0"}).code, 2);
  EXPECT_EQ(cli({"mc", "--alpha", "0.6", "--p0", "1.5"}).code, 2);
  EXPECT_EQ(cli({"mc", "--alpha", "0.6", "--p0", "0.6", "--p2", "0.6"}).code, 2);
  EXPECT_EQ(cli({"mc", "--alpha", "0.6", "--efficiency", "-0.1"}).code, 2);
  EXPECT_EQ(cli({"mc", "--alpha", "0.6", "--p2", "0.1", "--gamma-sq", "0.1"}).code, 2);
  EXPECT_EQ(cli({"mc", "--alpha", "0.6", "--trials", "10", "--out", "/nonexistent-dir/m.json"}).code,
            3);
}

// --- the installed binary -----------------------------------------------------

int exit_code_of(const std::string& args) {
  const std::string cmd = std::string(ECPSIM_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(CliBinaryTest, ExitCodes) {
  EXPECT_EQ(exit_code_of("run --alpha 0.6"), 0);
  EXPECT_EQ(exit_code_of("run --alpha 1.5"), 2);
  EXPECT_EQ(exit_code_of("mc --alpha 0.6 --trials 0"), 2);
  EXPECT_EQ(exit_code_of("sweep --preset fig4 --out /nonexistent-dir/x.csv"), 3);
}

}  // namespace
}  // namespace ecpsim

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

// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
// criterion fails. Tolerances are fixed here and never relaxed.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "ecpsim/elements.h"
#include "ecpsim/imperfections.h"
#include "ecpsim/metrics.h"
#include "ecpsim/protocols.h"

namespace {

using namespace ecpsim;

const double kSym = std::sqrt(0.5);
const PairCoefficients kSymmetric(kSym, kSym);

std::vector<double> grid() {
  std::vector<double> g;
  for (int i = 1; i <= 99; ++i) g.push_back(i / 100.0);
  return g;
}

double two_a2b2(const PairCoefficients& c) {
  return 2 * c.alpha() * c.alpha() * c.beta() * c.beta();
}

// Collects failed sub-checks of one criterion.
class Check {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok && failures_.size() < 6) failures_.push_back(what);
    failed_ = failed_ || !ok;
  }
  void note(const std::string& s) { notes_.push_back(s); }
  bool failed() const { return failed_; }
  std::string summary() const {
    std::string s;
    for (const auto& n : notes_) s += (s.empty() ? "" : "; ") + n;
    for (const auto& f : failures_) s += (s.empty() ? "" : "; ") + ("violated: " + f);
    return s;
  }

 private:
  bool failed_ = false;
  std::vector<std::string> failures_;
  std::vector<std::string> notes_;
};

std::string fmt(const char* f, double v) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// --- criteria ---------------------------------------------------------------

void round_one_probability(Check& c) {
  const auto t0 = std::chrono::steady_clock::now();
  double worst_run = 0, worst_brute = 0;
  for (double a : grid()) {
    const PairCoefficients k = PairCoefficients::from_alpha(a);
    const double exact = two_a2b2(k);
    worst_run = std::max(worst_run, std::abs(run_pbs2(k).total_success - exact));
    StateVector s = tensor(make_pair_state(k, "a1", "b1"), make_single_photon(k, "a3"));
    s = apply_pbs(apply_hwp90(s, "a3"), "a1", "a3", "c2", "c1");
    const double brute = postselect_one_photon_per_mode(s, {"c1", "c2", "b1"}).pass.probability;
    worst_brute = std::max(worst_brute, std::abs(brute - exact));
  }
  const double secs = seconds_since(t0);
  c.expect(worst_run <= 1e-12, "run_pbs2 vs 2|ab|^2 " + fmt("%.3g", worst_run));
  c.expect(worst_brute <= 1e-12, "brute-force circuit vs 2|ab|^2 " + fmt("%.3g", worst_brute));
  c.expect(secs < 1.0, "runtime " + fmt("%.3f s", secs));
  c.note("max err run " + fmt("%.2e", worst_run) + ", brute " + fmt("%.2e", worst_brute) +
         ", " + fmt("%.3f s", secs));
}

void maximal_output_fidelity(Check& c) {
  double worst = 0;
  int checked = 0;
  auto scan = [&](const ProtocolReport& r) {
    const StateVector target = target_state(r.n_parties);
    for (const auto& leaf : r.leaves) {
      if (!leaf.success) continue;
      ++checked;
      worst = std::max(worst, std::abs(1.0 - fidelity(leaf.state, target)));
    }
  };
  for (double a : grid()) {
    const PairCoefficients k = PairCoefficients::from_alpha(a);
    scan(run_pbs2(k));
    scan(run_qnd2(k, kDefaultMaxIterations, HomodyneScheme::ThetaPi));
    scan(run_qnd2(k, kDefaultMaxIterations, HomodyneScheme::RotatedProbe));
    for (int n = 3; n <= 6; ++n) {
      scan(run_pbs2_ghz(k, n));
      scan(run_qnd2_ghz(k, n, kDefaultMaxIterations));
    }
  }
  c.expect(worst <= 1e-12, "fidelity deficit " + fmt("%.3g", worst));
  c.note(std::to_string(checked) + " success leaves, max |1-F| " + fmt("%.2e", worst));
}

void series_identity(Check& c) {
  const double target = 1.0 - std::ldexp(1.0, -10);
  const double circuit = run_qnd2(kSymmetric, 10).total_success;
  const double recursion = total_p(kSymmetric, 10, TotalVariant::Derived);
  c.expect(std::abs(circuit - target) <= 1e-12, "circuit total " + fmt("%.15g", circuit));
  c.expect(std::abs(recursion - target) <= 1e-12, "recursion total " + fmt("%.15g", recursion));
  c.note("circuit " + fmt("%.13f", circuit) + ", recursion " + fmt("%.13f", recursion));
}

void closed_form_window(Check& c) {
  double worst = 0;
  for (double a : grid()) {
    const PairCoefficients k = PairCoefficients::from_alpha(a);
    for (int n : {1, 2}) worst = std::max(worst, std::abs(p_n_closed_form(k, n) - p_n_derived(k, n)));
  }
  // Both routes are closed forms in a^2, b^2; agreement is to rounding.
  c.expect(worst <= 1e-15, "N in {1,2} disagreement " + fmt("%.3g", worst));
  const double closed3 = p_n_closed_form(kSymmetric, 3);
  const double derived3 = p_n_derived(kSymmetric, 3);
  c.expect(std::abs(closed3 - 1.0 / 16) <= 1e-12, "closed form N=3 " + fmt("%.15g", closed3));
  c.expect(std::abs(derived3 - 1.0 / 8) <= 1e-12, "recursion N=3 " + fmt("%.15g", derived3));
  // Qualitative curve: the cumulative success rises with alpha up to the
  // symmetric point, where it reaches 0.999.
  double prev = 0;
  for (double a : grid()) {
    if (a > kSym) break;
    const double t = total_p(PairCoefficients::from_alpha(a), 10, TotalVariant::Derived);
    c.expect(t > prev, "cumulative success not increasing at alpha=" + fmt("%.2f", a));
    prev = t;
  }
  const double sym = total_p(kSymmetric, 10, TotalVariant::Derived);
  c.expect(sym > prev && std::abs(sym - 0.999) < 5e-4, "symmetric endpoint " + fmt("%.6f", sym));
  c.note("max |closed-derived| N<=2 " + fmt("%.1e", worst) + ", N=3 closed form " + fmt("%.4f", closed3) +
         " vs derived " + fmt("%.4f", derived3));
}

void efficiency_identities(Check& c) {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0;
  int order_violations = 0;
  for (double a : grid()) {
    const PairCoefficients k = PairCoefficients::from_alpha(a);
    worst = std::max(worst, std::abs(eta_pbs2(k) - 2 * eta_pbs1(k)));
    worst = std::max(worst, std::abs(eta_qnd2(k) - 2 * eta_qnd1(k)));
    const bool ordered =
        eta_qnd2(k) > eta_pbs2(k) && eta_pbs2(k) > eta_qnd1(k) && eta_qnd1(k) > eta_pbs1(k);
    if (!ordered) {
      ++order_violations;
      c.expect(false, "ordering E > D > C > B at alpha=" + fmt("%.2f", a));
    }
  }
  c.expect(worst <= 1e-12, "factor-2 identities " + fmt("%.3g", worst));
  const double pbs2 = eta_pbs2(kSymmetric);
  const double pbs1 = eta_pbs1(kSymmetric);
  c.expect(std::abs(pbs2 - 1.0) <= 1e-12, "eta_pbs2(1/sqrt2) = 1 (computed " + fmt("%.12g", pbs2) + ")");
  c.expect(std::abs(pbs1 - 0.5) <= 1e-12, "eta_pbs1(1/sqrt2) = 0.5 (computed " + fmt("%.12g", pbs1) + ")");
  const double secs = seconds_since(t0);
  c.expect(secs < 1.0, "runtime " + fmt("%.3f s", secs));
  c.note("factor-2 max err " + fmt("%.1e", worst) + ", ordering violations " +
         std::to_string(order_violations) + ", eta_qnd2(1/sqrt2) " +
         fmt("%.12g", eta_qnd2(kSymmetric)));
}

void limit_efficiency(Check& c) {
  const double v = eta_qnd2_limit(kSymmetric, 10);
  c.expect(std::abs(v - 0.9990234375) <= 1e-12, "eta_qnd2_limit(1/sqrt2, 10) " + fmt("%.15g", v));
  std::vector<double> alphas;
  for (double a : grid()) {
    if (a <= kSym) alphas.push_back(a);
  }
  alphas.push_back(kSym);
  double prev = 0;
  for (double a : alphas) {
    const double e = a == kSym ? v : eta_qnd2_limit(PairCoefficients::from_alpha(a), 10);
    c.expect(e > prev, "not increasing at alpha=" + fmt("%.4f", a));
    prev = e;
  }
  c.note("value " + fmt("%.13f", v) + ", " + std::to_string(alphas.size()) + " points monotone");
}

void ghz_invariance(Check& c) {
  double worst_p = 0, worst_f = 0;
  for (double a : grid()) {
    const PairCoefficients k = PairCoefficients::from_alpha(a);
    const ProtocolReport pbs_ref = run_pbs2(k);
    const ProtocolReport qnd_ref = run_qnd2(k, kDefaultMaxIterations);
    for (int n = 2; n <= 6; ++n) {
      const ProtocolReport pbs = run_pbs2_ghz(k, n);
      const ProtocolReport qnd = run_qnd2_ghz(k, n, kDefaultMaxIterations);
      const StateVector target = target_state(n);
      auto compare = [&](const ProtocolReport& r, const ProtocolReport& ref) {
        if (r.iterations.size() != ref.iterations.size()) {
          c.expect(false, "round count differs for n=" + std::to_string(n));
          return;
        }
        for (std::size_t i = 0; i < r.iterations.size(); ++i) {
          worst_p = std::max(worst_p, std::abs(r.iterations[i].unconditional_success -
                                               ref.iterations[i].unconditional_success));
        }
        for (const auto& leaf : r.leaves) {
          if (leaf.success) worst_f = std::max(worst_f, std::abs(1 - fidelity(leaf.state, target)));
        }
      };
      compare(pbs, pbs_ref);
      compare(qnd, qnd_ref);
    }
  }
  c.expect(worst_p <= 1e-12, "per-round probability drift " + fmt("%.3g", worst_p));
  c.expect(worst_f <= 1e-12, "GHZ fidelity deficit " + fmt("%.3g", worst_f));
  c.note("n=2..6, max prob diff " + fmt("%.1e", worst_p) + ", max |1-F| " + fmt("%.1e", worst_f));
}

void scheme_equivalence(Check& c) {
  int mismatches = 0;
  for (double a : grid()) {
    const PairCoefficients k = PairCoefficients::from_alpha(a);
    const ProtocolReport t = run_qnd2(k, kDefaultMaxIterations, HomodyneScheme::ThetaPi);
    const ProtocolReport r = run_qnd2(k, kDefaultMaxIterations, HomodyneScheme::RotatedProbe);
    bool same = t.total_success == r.total_success && t.iterations.size() == r.iterations.size() &&
                t.leaves.size() == r.leaves.size() && t.final_state_check == r.final_state_check;
    for (std::size_t i = 0; same && i < t.iterations.size(); ++i) {
      same = t.iterations[i].conditional_success == r.iterations[i].conditional_success &&
             t.iterations[i].unconditional_success == r.iterations[i].unconditional_success;
    }
    for (std::size_t i = 0; same && i < t.leaves.size(); ++i) {
      same = t.leaves[i].probability == r.leaves[i].probability &&
             t.leaves[i].outcome == r.leaves[i].outcome && t.leaves[i].success == r.leaves[i].success;
    }
    if (!same) {
      ++mismatches;
      c.expect(false, "reports differ at alpha=" + fmt("%.2f", a));
    }
  }
  c.note(std::to_string(99 - mismatches) + "/99 grid points bitwise equal");
}

void monte_carlo_calibration(Check& c) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::int64_t n = 100000;
  const std::vector<double> alphas{0.2, 0.4, 0.6, 0.70711, 0.9};
  const SourceModel ideal = SourceModel::ideal();
  const SourceModel heralded = SourceModel::single_photon(0.14, 0.0008);
  auto sigma = [n](double p) { return std::sqrt(p * (1 - p) / static_cast<double>(n)); };
  auto rate = [n](std::int64_t k) { return static_cast<double>(k) / static_cast<double>(n); };

  double worst_z = 0;
  std::int64_t false_resolving = 0;
  double max_false_threshold = 0, min_false_threshold = 1;
  std::uint64_t seed = 1000;
  for (double a : alphas) {
    const PairCoefficients k = PairCoefficients::from_alpha(a);
    const double p_pbs = two_a2b2(k);
    const double p_qnd = run_qnd2(k, kDefaultMaxIterations).total_success;

    // Ideal sources, resolving detectors.
    const TrialTally pbs = run_mc_pbs2(k, ideal, ideal, DetectorModel::resolving(), n, ++seed);
    const TrialTally qnd = run_mc_qnd2(k, ideal, ideal, DetectorModel::resolving(),
                                       kDefaultMaxIterations, n, ++seed);
    const double z_pbs = std::abs(rate(pbs.accepted) - p_pbs) / sigma(p_pbs);
    const double z_qnd = std::abs(rate(qnd.accepted) - p_qnd) / sigma(p_qnd);
    c.expect(z_pbs <= 3, "ideal PBS2 at alpha=" + fmt("%.5g", a) + " off by " + fmt("%.2f sigma", z_pbs));
    c.expect(z_qnd <= 3, "ideal QND2 at alpha=" + fmt("%.5g", a) + " off by " + fmt("%.2f sigma", z_qnd));
    worst_z = std::max({worst_z, z_pbs, z_qnd});

    // Heralded source numbers on the ancilla, resolving detectors.
    const TrialTally res = run_mc_pbs2(k, heralded, ideal, DetectorModel::resolving(), n, ++seed);
    false_resolving += res.false_success;
    const double expected = (1 - 0.14) * p_pbs;
    const double z_res = std::abs(rate(res.accepted) - expected) / sigma(expected);
    c.expect(z_res <= 3, "(1-p0) scaling at alpha=" + fmt("%.5g", a) + " off by " + fmt("%.2f sigma", z_res));
    worst_z = std::max(worst_z, z_res);

    // Same sources, threshold detectors.
    const TrialTally thr = run_mc_pbs2(k, heralded, ideal, DetectorModel::threshold(), n, ++seed);
    const double fr = rate(thr.false_success);
    c.expect(fr > 0, "no false acceptance with threshold detectors at alpha=" + fmt("%.5g", a));
    c.expect(fr < 5e-3, "false acceptance " + fmt("%.3g", fr) + " at alpha=" + fmt("%.5g", a));
    max_false_threshold = std::max(max_false_threshold, fr);
    min_false_threshold = std::min(min_false_threshold, fr);
  }
  c.expect(false_resolving == 0, "false successes with resolving detectors");
  const double secs = seconds_since(t0);
  c.expect(secs < 30.0, "runtime " + fmt("%.1f s", secs));
  c.note("worst deviation " + fmt("%.2f sigma", worst_z) + ", threshold false rate " +
         fmt("%.1e", min_false_threshold) + ".." + fmt("%.1e", max_false_threshold) + ", " +
         fmt("%.1f s", secs));
}

void branch_completeness(Check& c) {
  double worst = 0;
  for (double a : grid()) {
    const PairCoefficients k = PairCoefficients::from_alpha(a);
    for (const ProtocolReport& r :
         {run_pbs2(k), run_qnd2(k, kDefaultMaxIterations, HomodyneScheme::ThetaPi),
          run_qnd2(k, kDefaultMaxIterations, HomodyneScheme::RotatedProbe), run_qnd2(k, 1),
          run_pbs2_ghz(k, 4), run_qnd2_ghz(k, 4, kDefaultMaxIterations)}) {
      worst = std::max(worst, std::abs(leaf_probability_sum(r) - 1.0));
    }
  }
  c.expect(worst <= 1e-10, "leaf sum deviation " + fmt("%.3g", worst));
  c.note("max |sum - 1| " + fmt("%.1e", worst));
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<void(Check&)> run;
  };
  const std::vector<Criterion> criteria{
      {"round-one success probability", round_one_probability},
      {"maximal-output fidelity", maximal_output_fidelity},
      {"series identity at the symmetric point", series_identity},
      {"closed-form consistency window", closed_form_window},
      {"efficiency identities", efficiency_identities},
      {"limit efficiency", limit_efficiency},
      {"GHZ invariance", ghz_invariance},
      {"homodyne-scheme equivalence", scheme_equivalence},
      {"Monte Carlo calibration", monte_carlo_calibration},
      {"branch completeness", branch_completeness},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Check check;
    try {
      criteria[i].run(check);
    } catch (const std::exception& e) {
      check.expect(false, std::string("exception: ") + e.what());
    }
    failures += check.failed();
    std::printf("AC%zu %s %s: %s\n", i + 1, check.failed() ? "FAIL" : "PASS", criteria[i].name,
                check.summary().c_str());
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}

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

#include "ecpsim/fockstate.h"
#include "ecpsim/protocols.h"

namespace ecpsim {

enum class TotalVariant { ClosedForm, Derived };

/// Binary entropy in bits, with 0 log 0 = 0.
double binary_entropy(double p);

/// Entanglement (ebits) of alpha|HH> + beta|VV>.
double von_neumann_entropy(const PairCoefficients& coeffs);

/// Closed-form per-round success 2|ab|^(2^n) / (|a|^(2^n) + |b|^(2^n)),
/// evaluated literally. Matches the circuit for n = 1, 2 only.
double p_n_closed_form(const PairCoefficients& coeffs, int n);

/// Probability that round n is the first successful one. Recursion over the
/// recycled coefficients: s_k = 2 a_k^2 b_k^2, (a_{k+1}, b_{k+1}) ~ (a_k^2, b_k^2),
/// P_n = s_n prod_{j<n} (1 - s_j).
double p_n_derived(const PairCoefficients& coeffs, int n);

/// P_1 + ... + P_{n_max}.
double total_p(const PairCoefficients& coeffs, int n_max, TotalVariant variant);

/// Expected entanglement after one QND-based concentration step on two
/// copies, equal to the expected entanglement after one single-photon-assisted
/// cross-Kerr step: 2a^2b^2 + (a^4 + b^4) H2(a^4 / (a^4 + b^4)).
double e_prime_qnd1(const PairCoefficients& coeffs);

/// Efficiencies E_c / E_0; the two-copy protocols divide by 2E.
/// All throw UndefinedEfficiencyError when E_0 = 0.
double eta_pbs1(const PairCoefficients& coeffs);
double eta_qnd1(const PairCoefficients& coeffs);
double eta_pbs2(const PairCoefficients& coeffs);
double eta_qnd2(const PairCoefficients& coeffs);

/// total_p(derived, n_max) / E_0, each success contributing one ebit.
double eta_qnd2_limit(const PairCoefficients& coeffs, int n_max);

/// E_c = P_s + (1 - P_s) E' for one round. Linear-optics protocols leave a
/// separable failure (E' = 0); cross-Kerr ones leave the recyclable pair.
double expected_entanglement_after_one_round(const PairCoefficients& coeffs, Protocol protocol);

struct EfficiencyReport {
  double alpha = 0.0;
  double e0 = 0.0;
  double ec = 0.0;
  double eta = 0.0;
  Protocol protocol = Protocol::PBS2;
};

EfficiencyReport efficiency_report(const PairCoefficients& coeffs, Protocol protocol);

}  // namespace ecpsim

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

#include "ecpsim/metrics.h"

#include <algorithm>
#include <cmath>

#include "ecpsim/errors.h"

namespace ecpsim {
namespace {

double plogp(double p) { return p > 0.0 ? p * std::log2(p) : 0.0; }

void check_round(int n) {
  if (n < 1) throw InvalidCircuitError("round index must be at least 1");
}

double entropy_or_throw(const PairCoefficients& coeffs) {
  const double e = von_neumann_entropy(coeffs);
  if (!(e > 0.0)) {
    throw UndefinedEfficiencyError("efficiency undefined for a product input state");
  }
  return e;
}

}  // namespace

double binary_entropy(double p) { return -plogp(p) - plogp(1.0 - p); }

double von_neumann_entropy(const PairCoefficients& coeffs) {
  const double a2 = coeffs.alpha() * coeffs.alpha();
  const double b2 = coeffs.beta() * coeffs.beta();
  return -plogp(a2) - plogp(b2);
}

double p_n_closed_form(const PairCoefficients& coeffs, int n) {
  check_round(n);
  const double lo = std::min(coeffs.alpha(), coeffs.beta());
  const double hi = std::max(coeffs.alpha(), coeffs.beta());
  if (lo == 0.0) return 0.0;
  const double m = std::ldexp(1.0, n);  // 2^n
  // 2 (lo hi)^m / (lo^m + hi^m) = 2 lo^m / (1 + (lo/hi)^m), free of underflow in hi^m.
  return 2.0 * std::pow(lo, m) / (1.0 + std::pow(lo / hi, m));
}

double p_n_derived(const PairCoefficients& coeffs, int n) {
  check_round(n);
  double a2 = coeffs.alpha() * coeffs.alpha();
  double b2 = coeffs.beta() * coeffs.beta();
  double reach = 1.0;
  for (int k = 1; k < n; ++k) {
    // 1 - 2 a^2 b^2 = a^4 + b^4 when a^2 + b^2 = 1.
    const double fail = a2 * a2 + b2 * b2;
    reach *= fail;
    a2 = a2 * a2 / fail;
    b2 = b2 * b2 / fail;
  }
  return reach * 2.0 * a2 * b2;
}

double total_p(const PairCoefficients& coeffs, int n_max, TotalVariant variant) {
  check_round(n_max);
  double total = 0.0;
  for (int n = 1; n <= n_max; ++n) {
    total += variant == TotalVariant::ClosedForm ? p_n_closed_form(coeffs, n) : p_n_derived(coeffs, n);
  }
  return total;
}

double e_prime_qnd1(const PairCoefficients& coeffs) {
  const double a2 = coeffs.alpha() * coeffs.alpha();
  const double b2 = coeffs.beta() * coeffs.beta();
  const double fail = a2 * a2 + b2 * b2;
  // Both weights taken directly; 1 - x loses digits when one dominates.
  const double h = -plogp(a2 * a2 / fail) - plogp(b2 * b2 / fail);
  return 2.0 * a2 * b2 + fail * h;
}

double eta_pbs1(const PairCoefficients& coeffs) {
  const double a2 = coeffs.alpha() * coeffs.alpha();
  const double b2 = coeffs.beta() * coeffs.beta();
  return 2.0 * a2 * b2 / (2.0 * entropy_or_throw(coeffs));
}

double eta_qnd1(const PairCoefficients& coeffs) {
  return e_prime_qnd1(coeffs) / (2.0 * entropy_or_throw(coeffs));
}

double eta_pbs2(const PairCoefficients& coeffs) {
  const double a2 = coeffs.alpha() * coeffs.alpha();
  const double b2 = coeffs.beta() * coeffs.beta();
  return 2.0 * a2 * b2 / entropy_or_throw(coeffs);
}

double eta_qnd2(const PairCoefficients& coeffs) {
  return e_prime_qnd1(coeffs) / entropy_or_throw(coeffs);
}

double eta_qnd2_limit(const PairCoefficients& coeffs, int n_max) {
  return total_p(coeffs, n_max, TotalVariant::Derived) / entropy_or_throw(coeffs);
}

double expected_entanglement_after_one_round(const PairCoefficients& coeffs, Protocol protocol) {
  const double ps = p_n_derived(coeffs, 1);
  switch (protocol) {
    case Protocol::PBS1_analytic:
    case Protocol::PBS2:
      return ps;
    case Protocol::QND1_analytic:
    case Protocol::QND2: {
      const double fail = 1.0 - ps;
      if (fail <= 0.0) return ps;
      const PairCoefficients recycled = coeffs.squared();
      return ps + fail * von_neumann_entropy(recycled);
    }
  }
  return ps;
}

EfficiencyReport efficiency_report(const PairCoefficients& coeffs, Protocol protocol) {
  EfficiencyReport r;
  r.alpha = coeffs.alpha();
  r.protocol = protocol;
  r.e0 = von_neumann_entropy(coeffs);
  r.ec = expected_entanglement_after_one_round(coeffs, protocol);
  switch (protocol) {
    case Protocol::PBS1_analytic: r.eta = eta_pbs1(coeffs); break;
    case Protocol::QND1_analytic: r.eta = eta_qnd1(coeffs); break;
    case Protocol::PBS2: r.eta = eta_pbs2(coeffs); break;
    case Protocol::QND2: r.eta = eta_qnd2(coeffs); break;
  }
  return r;
}

}  // namespace ecpsim

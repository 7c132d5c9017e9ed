// Copyright 2026 The Lossless Release Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// zCDP bookkeeping, Gaussian calibration and (ε, δ) bounds for additive
// Poisson noise. Logarithms are natural.

#ifndef LOSSLESS_PRIVACY_ACCOUNT_HPP_
#define LOSSLESS_PRIVACY_ACCOUNT_HPP_

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace lossless {

struct ZcdpBudget {
  double rho = 0.0;
};

struct ApproxDpParams {
  double epsilon = 0.0;
  double delta = 0.0;
};

// Returned instead of a number when the bound does not apply.
struct PreconditionFailure {
  std::string reason;
  double min_lambda = 0.0;  // the rate must strictly exceed this
};

using PoissonBound = std::variant<ApproxDpParams, PreconditionFailure>;

// Sequential composition of independent mechanisms.
ZcdpBudget zcdp_compose(const std::vector<ZcdpBudget>& budgets);

// Leakage of any subset of releases drawn from one lossless ledger.
ZcdpBudget multiple_release_budget(const std::vector<ZcdpBudget>& budgets);

// Standard deviation Δ₂ / sqrt(2ρ) of the ρ-zCDP Gaussian mechanism.
double gaussian_sigma(double delta2, double rho);

// Smallest admissible rate is max(23 log(10d/δ), 2Δ∞), exclusive.
double poisson_min_lambda(double delta, std::int64_t d, double delta_inf);

// Three-term bound for arbitrary ℓ1, ℓ2, ℓ∞ sensitivities.
PoissonBound poisson_epsilon(double lambda, double delta, std::int64_t d,
                             double delta1, double delta2, double delta_inf);

// Two-term bound for unit sensitivities, valid for δ < 1/100.
PoissonBound poisson_epsilon_unit(double lambda, double delta, std::int64_t d);

}  // namespace lossless

#endif  // LOSSLESS_PRIVACY_ACCOUNT_HPP_

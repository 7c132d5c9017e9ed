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

#include "lossless/privacy_account.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "lossless/errors.hpp"

namespace lossless {
namespace {

void check_budgets(const std::vector<ZcdpBudget>& budgets) {
  if (budgets.empty()) throw DomainError("budget list is empty");
  for (const ZcdpBudget& b : budgets) {
    if (!(b.rho > 0.0) || !std::isfinite(b.rho)) {
      throw DomainError("zCDP budgets must be finite and positive");
    }
  }
}

void check_poisson_inputs(double lambda, double delta, std::int64_t d) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw DomainError("poisson rate must be positive");
  }
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("delta must lie in (0, 1)");
  if (d < 1) throw DomainError("dimension must be at least 1");
}

}  // namespace

ZcdpBudget zcdp_compose(const std::vector<ZcdpBudget>& budgets) {
  check_budgets(budgets);
  // Summing in sorted order makes the result independent of list order.
  std::vector<double> rhos;
  rhos.reserve(budgets.size());
  for (const ZcdpBudget& b : budgets) rhos.push_back(b.rho);
  std::sort(rhos.begin(), rhos.end());
  double total = 0.0;
  double carry = 0.0;
  for (double r : rhos) {
    const double t = total + r;
    carry += std::abs(total) >= std::abs(r) ? (total - t) + r : (r - t) + total;
    total = t;
  }
  return {total + carry};
}

ZcdpBudget multiple_release_budget(const std::vector<ZcdpBudget>& budgets) {
  check_budgets(budgets);
  double top = 0.0;
  for (const ZcdpBudget& b : budgets) top = std::max(top, b.rho);
  return {top};
}

double gaussian_sigma(double delta2, double rho) {
  if (!(delta2 > 0.0) || !(rho > 0.0) || !std::isfinite(delta2) ||
      !std::isfinite(rho)) {
    throw DomainError("gaussian_sigma requires positive inputs");
  }
  return delta2 / std::sqrt(2.0 * rho);
}

double poisson_min_lambda(double delta, std::int64_t d, double delta_inf) {
  return std::max(23.0 * std::log(10.0 * static_cast<double>(d) / delta),
                  2.0 * delta_inf);
}

PoissonBound poisson_epsilon(double lambda, double delta, std::int64_t d,
                             double delta1, double delta2, double delta_inf) {
  check_poisson_inputs(lambda, delta, d);
  if (!(delta1 > 0.0) || !(delta2 > 0.0) || !(delta_inf > 0.0)) {
    throw DomainError("sensitivities must be positive");
  }
  const double bound = poisson_min_lambda(delta, d, delta_inf);
  if (!(lambda > bound)) {
    return PreconditionFailure{"rate must exceed max(23 log(10d/delta), 2 sens_inf)",
                               bound};
  }
  const double dd = static_cast<double>(d);
  const double log_125 = std::log(1.25 / delta);
  const double log_10 = std::log(10.0 / delta);
  const double log_20d = std::log(20.0 * dd / delta);
  const double first = delta2 * std::sqrt(2.0 * log_125) / std::sqrt(lambda);
  const double second =
      (5.0 * std::sqrt(2.0) * delta2 * std::sqrt(log_10) + 5.0 / 3.0 * delta1) /
      (lambda * (1.0 - delta / 10.0));
  const double third = (2.0 / 3.0 * delta_inf * log_125 +
                        4.0 / 3.0 * delta_inf * log_20d * log_10) /
                       lambda;
  return ApproxDpParams{first + second + third, delta};
}

PoissonBound poisson_epsilon_unit(double lambda, double delta,
                                  std::int64_t d) {
  check_poisson_inputs(lambda, delta, d);
  if (!(delta < 0.01)) {
    return PreconditionFailure{"simplified bound requires delta < 1/100", 0.0};
  }
  const double bound = 23.0 * std::log(10.0 * static_cast<double>(d) / delta);
  if (!(lambda > bound)) {
    return PreconditionFailure{"rate must exceed 23 log(10d/delta)", bound};
  }
  const double dd = static_cast<double>(d);
  const double first = std::sqrt(2.0 * std::log(1.25 / delta)) / std::sqrt(lambda);
  const double second =
      2.0 * std::log(20.0 * dd / delta) * std::log(10.0 / delta) / lambda;
  return ApproxDpParams{first + second, delta};
}

}  // namespace lossless

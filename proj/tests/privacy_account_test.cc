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

#include <algorithm>
#include <cmath>
#include <random>
#include <variant>
#include <vector>

#include <gtest/gtest.h>

#include "lossless/errors.hpp"
#include "lossless/privacy_account.hpp"

namespace lossless {
namespace {

TEST(ComposeTest, Examples) {
  EXPECT_EQ(zcdp_compose({{1.0}, {2.0}}).rho, 3.0);
  EXPECT_EQ(zcdp_compose({{0.7}}).rho, 0.7);
  EXPECT_NEAR(zcdp_compose(std::vector<ZcdpBudget>(10, {0.1})).rho, 1.0, 1e-15);
  EXPECT_THROW(zcdp_compose({}), DomainError);
  EXPECT_THROW(zcdp_compose({{-1.0}}), DomainError);
}

TEST(ComposeTest, PermutationInvariant) {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  std::vector<ZcdpBudget> b(50);
  for (auto& x : b) x.rho = u(gen);
  const double total = zcdp_compose(b).rho;
  for (int t = 0; t < 20; ++t) {
    std::shuffle(b.begin(), b.end(), gen);
    EXPECT_EQ(zcdp_compose(b).rho, total);
  }
}

TEST(MultipleReleaseBudgetTest, Examples) {
  const std::vector<ZcdpBudget> b = {{0.5}, {2.0}, {1.0}};
  EXPECT_EQ(multiple_release_budget(b).rho, 2.0);
  EXPECT_EQ(multiple_release_budget({{0.3}}).rho, 0.3);
  EXPECT_EQ(zcdp_compose(b).rho, 3.5);
  EXPECT_THROW(multiple_release_budget({}), DomainError);
}

TEST(GaussianSigmaTest, Examples) {
  EXPECT_DOUBLE_EQ(gaussian_sigma(1.0, 0.5), 1.0);
  EXPECT_DOUBLE_EQ(gaussian_sigma(2.0, 2.0), 1.0);
  EXPECT_NEAR(gaussian_sigma(1.0, 5.0), 0.316227766, 1e-9);
  EXPECT_THROW(gaussian_sigma(1.0, 0.0), DomainError);
}

TEST(PoissonEpsilonTest, UnitExample) {
  const auto r = poisson_epsilon_unit(1000.0, 1e-6, 1);
  ASSERT_TRUE(std::holds_alternative<ApproxDpParams>(r));
  const double first = std::sqrt(2.0 * std::log(1.25e6)) / std::sqrt(1000.0);
  const double second = 2.0 * std::log(2e7) * std::log(1e7) / 1000.0;
  EXPECT_NEAR(first, 0.1676, 1e-4);
  EXPECT_NEAR(second, 0.542, 1e-3);
  EXPECT_NEAR(std::get<ApproxDpParams>(r).epsilon, first + second, 1e-12);
  EXPECT_NEAR(std::get<ApproxDpParams>(r).epsilon, 0.709, 1e-3);
  EXPECT_EQ(std::get<ApproxDpParams>(r).delta, 1e-6);
}

TEST(PoissonEpsilonTest, Preconditions) {
  const double bound = 23.0 * std::log(1e7);
  EXPECT_NEAR(bound, 370.7, 0.05);
  EXPECT_TRUE(std::holds_alternative<PreconditionFailure>(poisson_epsilon_unit(300.0, 1e-6, 1)));
  EXPECT_TRUE(
      std::holds_alternative<PreconditionFailure>(poisson_epsilon_unit(bound * 0.999, 1e-6, 1)));
  EXPECT_TRUE(std::holds_alternative<ApproxDpParams>(poisson_epsilon_unit(bound * 1.001, 1e-6, 1)));
  EXPECT_TRUE(std::holds_alternative<PreconditionFailure>(poisson_epsilon_unit(1e6, 0.05, 1)));
  EXPECT_TRUE(std::holds_alternative<PreconditionFailure>(
      poisson_epsilon(300.0, 1e-6, 1, 1.0, 1.0, 1.0)));
  const auto f = std::get<PreconditionFailure>(poisson_epsilon(1000.0, 1e-6, 1, 1.0, 1.0, 600.0));
  EXPECT_EQ(f.min_lambda, 1200.0);
  EXPECT_THROW(poisson_epsilon_unit(1000.0, 0.0, 1), DomainError);
  EXPECT_THROW(poisson_epsilon_unit(1000.0, 1e-6, 0), DomainError);
}

TEST(PoissonEpsilonTest, BothPathsFiniteAndPositive) {
  for (double lambda : {400.0, 1000.0, 1e5}) {
    const auto a = poisson_epsilon(lambda, 1e-6, 1, 1.0, 1.0, 1.0);
    const auto b = poisson_epsilon_unit(lambda, 1e-6, 1);
    ASSERT_TRUE(std::holds_alternative<ApproxDpParams>(a));
    ASSERT_TRUE(std::holds_alternative<ApproxDpParams>(b));
    for (double e : {std::get<ApproxDpParams>(a).epsilon, std::get<ApproxDpParams>(b).epsilon}) {
      EXPECT_TRUE(std::isfinite(e));
      EXPECT_GT(e, 0.0);
    }
  }
}

TEST(PoissonEpsilonTest, DecreasesInLambda) {
  double prev = INFINITY;
  for (double lambda = 400.0; lambda < 1e6; lambda *= 1.7) {
    const double e = std::get<ApproxDpParams>(poisson_epsilon(lambda, 1e-6, 3, 1.0, 1.0, 1.0)).epsilon;
    EXPECT_LT(e, prev);
    prev = e;
  }
}

}  // namespace
}  // namespace lossless

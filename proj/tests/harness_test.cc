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

#include <cmath>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "lossless/harness/fig2.hpp"
#include "lossless/harness/stat_tests.hpp"
#include "lossless/harness/suite.hpp"
#include "oracles.hpp"

namespace lossless {
namespace {

TEST(KolmogorovTest, KnownQuantiles) {
  EXPECT_NEAR(stats::kolmogorov_survival(1.3581), 0.05, 1e-4);
  EXPECT_NEAR(stats::kolmogorov_survival(1.6276), 0.01, 1e-4);
  EXPECT_EQ(stats::kolmogorov_survival(0.0), 1.0);
}

TEST(KsTest, DetectsShift) {
  std::mt19937_64 gen(1);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> a(20000), b(20000);
  for (auto& x : a) x = n(gen);
  for (auto& x : b) x = n(gen) + 0.1;
  EXPECT_GT(stats::ks_one_sample(a, test::normal_cdf).p_value, 0.01);
  EXPECT_LT(stats::ks_one_sample(b, test::normal_cdf).p_value, 1e-6);
  EXPECT_LT(stats::ks_two_sample(a, b).p_value, 1e-6);
  EXPECT_EQ(stats::ks_two_sample(a, a).statistic, 0.0);
}

TEST(ChiSquareTest, ExactCountsAndPooling) {
  const auto r = stats::chi_square_gof({25, 25, 50}, {0.25, 0.25, 0.5});
  EXPECT_EQ(r.statistic, 0.0);
  EXPECT_NEAR(r.p_value, 1.0, 1e-12);
  EXPECT_EQ(r.dof, 2);
  // Sparse bins get pooled until each expected count is at least 5.
  const auto pooled = stats::chi_square_gof({1, 1, 98}, {0.01, 0.01, 0.98});
  EXPECT_LE(pooled.dof, 1);
  EXPECT_LT(stats::chi_square_homogeneity({100, 0, 100}, {0, 100, 100}).p_value, 1e-10);
}

TEST(CovarianceTest, StandardErrors) {
  std::mt19937_64 gen(2);
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXd s(100000, 2);
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    const double z = n(gen);
    s(i, 0) = z;
    s(i, 1) = 0.5 * z + n(gen);
  }
  const auto est = stats::covariance(s);
  EXPECT_NEAR(est.cov(0, 1), 0.5, 4 * est.se(0, 1));
  EXPECT_NEAR(est.cov(1, 1), 1.25, 4 * est.se(1, 1));
  // Var of the sample covariance of (Z, 0.5Z + W) is (1 * 1.25 + 0.25) / n.
  EXPECT_NEAR(est.se(0, 1), std::sqrt(1.5 / 1e5), 2e-4);
}

TEST(Fig2Test, GridAndRowCount) {
  const auto grid = fig2::log_grid(0.001, 5.0, 20);
  ASSERT_EQ(grid.size(), 20u);
  EXPECT_NEAR(grid.front(), 0.001, 1e-15);
  EXPECT_NEAR(grid.back(), 5.0, 1e-12);
  fig2::ExperimentConfig c;
  c.rho_grid = grid;
  c.repetitions = 200;
  c.seed = 7;
  const auto rows = fig2::run_fig2(c);
  EXPECT_EQ(rows.size(), 40u);
  const std::string csv = fig2::format_csv(rows);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "rho,mode,n_releases,empirical_variance,theoretical_variance");
  int n = 0;
  while (std::getline(in, line)) ++n;
  EXPECT_EQ(n, 40);
}

TEST(Fig2Test, Deterministic) {
  fig2::ExperimentConfig c;
  c.rho_grid = fig2::log_grid(0.01, 1.0, 5);
  c.repetitions = 5000;
  c.seed = 99;
  EXPECT_EQ(fig2::format_csv(fig2::run_fig2(c)), fig2::format_csv(fig2::run_fig2(c)));
  auto other = c;
  other.seed = 100;
  EXPECT_NE(fig2::format_csv(fig2::run_fig2(c)), fig2::format_csv(fig2::run_fig2(other)));
}

TEST(Fig2Test, SinglePointModesCoincide) {
  fig2::ExperimentConfig c;
  c.rho_grid = {0.7};
  c.repetitions = 20000;
  c.seed = 3;
  const auto rows = fig2::run_fig2(c);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].theoretical_variance, rows[1].theoretical_variance);
  EXPECT_NEAR(rows[0].theoretical_variance, 0.5 / 0.7, 1e-15);
  for (const auto& r : rows) EXPECT_EQ(r.n_releases, 1);
}

TEST(Fig2Test, RejectsBadConfig) {
  fig2::ExperimentConfig c;
  c.rho_grid = {1.0, 0.5};
  c.repetitions = 10;
  EXPECT_ANY_THROW(fig2::run_fig2(c));
  c.rho_grid = {0.5, 1.0};
  c.repetitions = 0;
  EXPECT_ANY_THROW(fig2::run_fig2(c));
}

TEST(InvariantSuiteTest, QuickBatteryPasses) {
  suite::Options options;
  options.quick = true;
  for (const auto& o : suite::run_invariants(options)) {
    EXPECT_TRUE(o.pass) << suite::format_line(o);
  }
}

}  // namespace
}  // namespace lossless

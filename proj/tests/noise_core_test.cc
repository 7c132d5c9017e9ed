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
#include <vector>

#include <gtest/gtest.h>

#include "lossless/errors.hpp"
#include "lossless/harness/stat_tests.hpp"
#include "lossless/noise_core.hpp"
#include "oracles.hpp"

namespace lossless {
namespace {

using test::simpson;

TEST(GaussianTest, PointMass) {
  RandomSource gen(1);
  EXPECT_EQ(sample_gaussian(GaussianSpec{5.0, 0.0}, gen), 5.0);
}

TEST(GaussianTest, RejectsNegativeVariance) {
  RandomSource gen(1);
  EXPECT_THROW(sample_gaussian(GaussianSpec{0.0, -1.0}, gen), DomainError);
}

TEST(GaussianTest, UnitVariance) {
  RandomSource gen(2);
  stats::Moments m;
  for (int i = 0; i < 1000000; ++i) m.add(sample_gaussian(GaussianSpec{0.0, 1.0}, gen));
  EXPECT_NEAR(m.variance(), 1.0, 0.01);
}

TEST(GaussianBridgeTest, Examples) {
  EXPECT_NEAR(gaussian_bridge(1.0, 2.0, 4.0, 1.0).variance, 1.0 / 12.0, 1e-15);
  EXPECT_NEAR(gaussian_bridge(0.0, 1.0, kInfinity, 1.0).variance, 0.5, 1e-15);
  EXPECT_EQ(gaussian_bridge(1.0, 1.0, 4.0, 1.0).variance, 0.0);
  EXPECT_THROW(gaussian_bridge(2.0, 1.0, 4.0, 1.0), DomainError);
}

TEST(GaussianBridgeTest, CombinedReleaseHasTargetVariance) {
  // Y = w_l Y_l + w_r Y_r + bridge, with Var Y_j = 1/(2 rho_j) and
  // Cov(Y_l, Y_r) = 1/(2 rho_r).
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0.05, 10.0);
  for (int i = 0; i < 200; ++i) {
    double a = u(gen), b = u(gen), c = u(gen);
    double v[3] = {a, b, c};
    std::sort(v, v + 3);
    if (v[1] - v[0] < 1e-3 || v[2] - v[1] < 1e-3) continue;
    const auto w = gaussian_combine_weights(v[0], v[1], v[2]);
    const double var_l = 0.5 / v[0], var_r = 0.5 / v[2], cov = 0.5 / v[2];
    const double total = w.left * w.left * var_l + w.right * w.right * var_r +
                         2 * w.left * w.right * cov +
                         gaussian_bridge(v[0], v[1], v[2], 1.0).variance;
    EXPECT_NEAR(total, 0.5 / v[1], 1e-12 * (0.5 / v[1]));
    // Cov(Y, Y_l) = 1/(2 rho) and Cov(Y, Y_r) = 1/(2 rho_r).
    EXPECT_NEAR(w.left * var_l + w.right * cov, 0.5 / v[1], 1e-12 / v[0]);
    EXPECT_NEAR(w.left * cov + w.right * var_r, 0.5 / v[2], 1e-12 / v[0]);
  }
}

TEST(CombineWeightsTest, Examples) {
  const auto w = gaussian_combine_weights(1.0, 2.0, 4.0);
  EXPECT_NEAR(w.left, 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(w.right, 2.0 / 3.0, 1e-15);
  const auto z = gaussian_combine_weights(0.0, 3.0, 7.0);
  EXPECT_EQ(z.left, 0.0);
  EXPECT_EQ(z.right, 1.0);
  const auto same = gaussian_combine_weights(2.0, 2.0, 7.0);
  EXPECT_EQ(same.left, 1.0);
  EXPECT_EQ(same.right, 0.0);
}

TEST(LaplaceBridgeTest, AtomProbability) {
  RandomSource gen(4);
  const int n = 200000;
  int zeros = 0;
  for (int i = 0; i < n; ++i) zeros += sample_laplace_bridge(1.0, 2.0, gen) == 0.0;
  const double se = std::sqrt(0.25 * 0.75 / n);
  EXPECT_NEAR(zeros / double(n), 0.25, 4 * se);
}

TEST(LaplaceBridgeTest, DegenerateBridgeIsAlmostAlwaysZero) {
  RandomSource gen(5);
  int nonzero = 0;
  for (int i = 0; i < 10000; ++i) nonzero += sample_laplace_bridge(1.0, 1.0 + 1e-12, gen) != 0.0;
  EXPECT_LE(nonzero, 1);
}

TEST(LaplaceBridgeTest, ConvolutionMatchesWiderLaplace) {
  RandomSource gen(6);
  std::vector<double> x(100000);
  for (auto& v : x) v = sample_laplace(LaplaceSpec{1.0}, gen) + sample_laplace_bridge(1.0, 3.0, gen);
  const auto r = stats::ks_one_sample(x, [](double t) { return test::laplace_cdf(3.0, t); });
  EXPECT_GT(r.p_value, 0.01);
}

TEST(LaplaceConvDensityTest, Examples) {
  EXPECT_NEAR(laplace_conv_density(2.0, 1.0, 0.0), 1.0 / 6.0, 1e-15);
  for (double t : {0.3, 1.0, 4.5}) {
    EXPECT_DOUBLE_EQ(laplace_conv_density(2.0, 1.0, t), laplace_conv_density(2.0, 1.0, -t));
  }
}

TEST(LaplaceConvDensityTest, MatchesNumericalConvolution) {
  for (auto [b1, b2] : {std::pair{2.0, 1.0}, {0.5, 3.0}, {1.0, 1.1}}) {
    for (double t : {0.0, 0.7, -2.0, 5.0}) {
      const double direct = simpson(
          [&](double s) { return test::laplace_pdf(b1, s) * test::laplace_pdf(b2, t - s); },
          -80.0, 80.0, 400000);
      EXPECT_NEAR(laplace_conv_density(b1, b2, t), direct, 1e-8);
    }
  }
}

TEST(LaplaceConvDensityTest, IntegratesToOne) {
  const double mass =
      simpson([](double t) { return laplace_conv_density(2.0, 1.0, t); }, -120.0, 120.0, 400000);
  EXPECT_NEAR(mass, 1.0, 1e-6);
}

TEST(LaplaceConditionalTest, WeightsSumToOne) {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(0.1, 10.0);
  std::normal_distribution<double> kdist(0.0, 5.0);
  for (int i = 0; i < 1000; ++i) {
    double v[3] = {u(gen), u(gen), u(gen)};
    std::sort(v, v + 3);
    if (v[1] - v[0] < 1e-6 || v[2] - v[1] < 1e-6) continue;
    double k = kdist(gen);
    if (k == 0.0) k = 1.0;
    const auto w = laplace_conditional_weights(v[1], v[0], v[2], k);
    EXPECT_NEAR(w.p0 + w.pk + w.pH, 1.0, 1e-9);
    EXPECT_GE(std::min({w.p0, w.pk, w.pH}), 0.0);
  }
}

TEST(LaplaceConditionalTest, ZeroGapIsDeterministic) {
  const auto w = laplace_conditional_weights(2.0, 1.0, 3.0, 0.0);
  EXPECT_EQ(w.p0, 1.0);
  RandomSource gen(8);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(sample_laplace_conditional(2.0, 1.0, 3.0, 0.0, gen), 0.0);
}

TEST(LaplaceConditionalTest, WeightsMatchRejectionSampling) {
  // Pieces: W1 = 0 w.p. (b2/b)^2 else Lap(b); W2 = 0 w.p. (b/b1)^2 else Lap(b1).
  const double b = 2.0, b2 = 1.0, b1 = 3.0, k = 1.0, half = 0.005;
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::exponential_distribution<double> e(1.0);
  auto piece = [&](double atom, double scale) {
    if (unit(gen) < atom) return 0.0;
    const double m = e(gen) * scale;
    return unit(gen) < 0.5 ? m : -m;
  };
  long accepted = 0, first_zero = 0, second_zero = 0;
  for (long i = 0; i < 10000000; ++i) {
    const double w1 = piece((b2 / b) * (b2 / b), b);
    const double w2 = piece((b / b1) * (b / b1), b1);
    if (std::abs(w1 + w2 - k) > half) continue;
    ++accepted;
    first_zero += w1 == 0.0;
    second_zero += w2 == 0.0;
  }
  ASSERT_GT(accepted, 1000);
  const auto w = laplace_conditional_weights(b, b2, b1, k);
  const double n = static_cast<double>(accepted);
  EXPECT_NEAR(first_zero / n, w.p0, 4 * std::sqrt(w.p0 * (1 - w.p0) / n));
  EXPECT_NEAR(second_zero / n, w.pk, 4 * std::sqrt(w.pk * (1 - w.pk) / n));
}

TEST(LaplaceConditionalTest, ProductBranchMatchesDensity) {
  // Density proportional to f_2(x) f_1(1 - x), binned and compared by chi-square.
  const double b = 2.0, b2 = 1.0, k = 1.0;
  auto h = [&](double x) { return test::laplace_pdf(b, x) * test::laplace_pdf(b2, k - x); };
  const double lo = -6.0, hi = 7.0;
  const int bins = 52;
  const double width = (hi - lo) / bins;
  const double total = simpson(h, -200.0, 200.0, 800000);
  std::vector<double> probs(bins);
  for (int i = 0; i < bins; ++i) {
    probs[i] = simpson(h, lo + i * width, lo + (i + 1) * width, 200) / total;
  }
  double inside = 0.0;
  for (double p : probs) inside += p;
  RandomSource gen(10);
  const int n = 300000;
  std::vector<double> observed(bins, 0.0);
  double outside = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = sample_laplace_product(b, b2, k, gen);
    const int j = static_cast<int>(std::floor((x - lo) / width));
    if (j < 0 || j >= bins) {
      outside += 1;
    } else {
      observed[j] += 1;
    }
  }
  const auto r = stats::chi_square_gof(observed, probs, outside);
  EXPECT_GT(r.p_value, 0.01) << "chi2 " << r.statistic << " on " << r.dof << " dof";
  EXPECT_NEAR(outside / n, 1.0 - inside, 4 * std::sqrt((1.0 - inside) / n) + 1e-9);
}

TEST(LaplaceConditionalTest, SamplerReconstructsJoint) {
  // Draw W2 ~ Lap(3)-bridge, then X1 from the conditional given the total,
  // and check X1 has the bridge law W1.
  const double b = 2.0, b2 = 1.0, b1 = 3.0;
  RandomSource gen(11);
  const int n = 100000;
  std::vector<double> nonzero;
  int zeros = 0;
  for (int i = 0; i < n; ++i) {
    const double w1 = sample_laplace_bridge(b2, b, gen);
    const double w2 = sample_laplace_bridge(b, b1, gen);
    const double x1 = sample_laplace_conditional(b, b2, b1, w1 + w2, gen);
    if (x1 == 0.0) {
      ++zeros;
    } else {
      nonzero.push_back(x1);
    }
  }
  const double atom = (b2 / b) * (b2 / b);
  EXPECT_NEAR(zeros / double(n), atom, 4 * std::sqrt(atom * (1 - atom) / n));
  const auto r = stats::ks_one_sample(nonzero, [&](double t) { return test::laplace_cdf(b, t); });
  EXPECT_GT(r.p_value, 0.01);
}

TEST(PoissonBridgeTest, Examples) {
  RandomSource gen(12);
  std::vector<double> counts(30, 0.0);
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const auto v = sample_poisson(PoissonSpec{1.0}, gen) + sample_poisson_bridge(3.0, 1.0, gen);
    counts[std::min<std::int64_t>(v, 29)] += 1;
  }
  std::vector<double> probs(21);
  double inside = 0.0;
  for (int k = 0; k <= 20; ++k) inside += probs[k] = test::poisson_pmf(3.0, k);
  std::vector<double> observed(counts.begin(), counts.begin() + 21);
  double tail = 0.0;
  for (int k = 21; k < 30; ++k) tail += counts[k];
  EXPECT_GT(stats::chi_square_gof(observed, probs, tail).p_value, 0.01);

  int nonzero = 0;
  for (int i = 0; i < 10000; ++i) nonzero += sample_poisson_bridge(2.0, 2.0 - 1e-12, gen) != 0;
  EXPECT_LE(nonzero, 1);
}

TEST(PoissonConditionalTest, BinomialExamples) {
  const auto pmf = poisson_conditional_pmf(2.0, 3.0, 5);
  ASSERT_EQ(pmf.size(), 6u);
  for (int j = 0; j <= 5; ++j) EXPECT_NEAR(pmf[j], test::binomial_pmf(5, 0.4, j), 1e-14);
  const auto sym = poisson_conditional_pmf(1.5, 1.5, 10);
  for (int j = 0; j <= 10; ++j) EXPECT_NEAR(sym[j], test::binomial_pmf(10, 0.5, j), 1e-14);
}

TEST(PoissonConditionalTest, JointEnumeration) {
  const auto pmf = poisson_conditional_pmf(1.0, 2.0, 4);
  double z = 0.0;
  for (int j = 0; j <= 4; ++j) z += test::poisson_pmf(1.0, j) * test::poisson_pmf(2.0, 4 - j);
  for (int j = 0; j <= 4; ++j) {
    EXPECT_NEAR(pmf[j], test::poisson_pmf(1.0, j) * test::poisson_pmf(2.0, 4 - j) / z, 1e-14);
  }
}

TEST(PoissonConditionalTest, SamplerFrequencies) {
  RandomSource gen(13);
  std::vector<double> observed(6, 0.0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) observed[sample_poisson_conditional(2.0, 3.0, 5, gen)] += 1;
  EXPECT_GT(stats::chi_square_gof(observed, poisson_conditional_pmf(2.0, 3.0, 5)).p_value, 0.01);
}

TEST(ExponentialBridgeTest, AtomAndConvolution) {
  RandomSource gen(14);
  const int n = 100000;
  int zeros = 0;
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) {
    const double bridge = sample_exponential_bridge(1.0, 2.0, gen);
    zeros += bridge == 0.0;
    x[i] = sample_exponential(ExponentialSpec{2.0}, gen) + bridge;
  }
  EXPECT_NEAR(zeros / double(n), 0.5, 4 * std::sqrt(0.25 / n));
  EXPECT_GT(stats::ks_one_sample(x, [](double t) { return test::exponential_cdf(1.0, t); }).p_value,
            0.01);
  int nonzero = 0;
  for (int i = 0; i < 10000; ++i) nonzero += sample_exponential_bridge(1.0, 1.0 + 1e-12, gen) != 0.0;
  EXPECT_LE(nonzero, 1);
}

TEST(ExponentialConditionalTest, WeightsSumToOne) {
  std::mt19937_64 gen(15);
  std::uniform_real_distribution<double> u(0.1, 10.0);
  for (int i = 0; i < 1000; ++i) {
    double v[3] = {u(gen), u(gen), u(gen)};
    std::sort(v, v + 3);
    if (v[1] - v[0] < 1e-6 || v[2] - v[1] < 1e-6) continue;
    const auto w = exponential_conditional_weights(v[0], v[1], v[2], u(gen));
    EXPECT_NEAR(w.p0 + w.pk + w.pH, 1.0, 1e-9);
  }
}

TEST(TruncatedGaussianTest, Untruncated) {
  RandomSource gen(16);
  stats::Moments m;
  for (int i = 0; i < 100000; ++i) {
    m.add(sample_truncated_gaussian(GaussianSpec{0.0, 1.0}, -kInfinity, kInfinity, gen));
  }
  EXPECT_NEAR(m.mean(), 0.0, 4.0 / std::sqrt(1e5));
  EXPECT_NEAR(m.variance(), 1.0, 0.02);
}

TEST(TruncatedGaussianTest, UpperTailMean) {
  const double mills = test::normal_pdf(2.0) / test::normal_sf(2.0);
  EXPECT_NEAR(mills, 2.3732, 1e-4);
  RandomSource gen(17);
  stats::Moments m;
  for (int i = 0; i < 100000; ++i) {
    const double x = sample_truncated_gaussian(GaussianSpec{0.0, 1.0}, 2.0, kInfinity, gen);
    ASSERT_GT(x, 2.0);
    m.add(x);
  }
  EXPECT_NEAR(m.mean(), mills, 4 * std::sqrt(m.variance() / 1e5));
}

TEST(TruncatedGaussianTest, HardUpperBound) {
  RandomSource gen(18);
  for (int i = 0; i < 100000; ++i) {
    ASSERT_LE(sample_truncated_gaussian(GaussianSpec{0.0, 1.0}, -kInfinity, 0.0, gen), 0.0);
  }
  for (int i = 0; i < 10000; ++i) {
    const double x = sample_truncated_gaussian(GaussianSpec{1.0, 4.0}, 30.0, kInfinity, gen);
    ASSERT_GT(x, 30.0);
  }
}

TEST(NormalTailTest, MatchesErfc) {
  for (double x : {-5.0, -1.0, 0.0, 0.5, 2.0, 8.0, 30.0}) {
    EXPECT_NEAR(normal_upper_tail(x) / test::normal_sf(x), 1.0, 1e-12);
    EXPECT_NEAR(normal_lower_tail(x), test::normal_cdf(x), 1e-15);
  }
  for (double q : {1e-300, 1e-8, 0.02275, 0.5, 0.9}) {
    EXPECT_NEAR(test::normal_sf(normal_upper_quantile(q)) / q, 1.0, 1e-10);
  }
}

}  // namespace
}  // namespace lossless

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

// Goodness-of-fit tests and moment estimators for checking samplers.

#ifndef LOSSLESS_HARNESS_STAT_TESTS_HPP_
#define LOSSLESS_HARNESS_STAT_TESTS_HPP_

#include <functional>
#include <vector>

#include <Eigen/Core>

namespace lossless::stats {

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  int dof = 0;  // chi-square only
};

// Pr[K > lambda] for the Kolmogorov distribution.
double kolmogorov_survival(double lambda);

TestResult ks_one_sample(std::vector<double> sample,
                         const std::function<double(double)>& cdf);
TestResult ks_two_sample(std::vector<double> a, std::vector<double> b);

// Observed counts against bin probabilities; adjacent bins are merged until
// every expected count is at least 5. Probability left outside the listed
// bins is added as one extra bin with observed count `overflow`.
TestResult chi_square_gof(const std::vector<double>& observed,
                          const std::vector<double>& probs, double overflow = 0.0);

// Two rows of counts over the same ordered bins; adjacent bins are merged
// until every expected count is at least 5.
TestResult chi_square_homogeneity(const std::vector<double>& a,
                                  const std::vector<double>& b);

double mean(const std::vector<double>& x);
double variance(const std::vector<double>& x);  // unbiased

struct CovarianceEstimate {
  Eigen::MatrixXd cov;
  Eigen::MatrixXd se;  // standard error of each entry
};

// Rows are trials, columns are variables.
CovarianceEstimate covariance(const Eigen::MatrixXd& samples);

// Running mean and variance, mergeable across blocks.
class Moments {
 public:
  void add(double x);
  void merge(const Moments& other);
  long long count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }

 private:
  long long n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

}  // namespace lossless::stats

#endif  // LOSSLESS_HARNESS_STAT_TESTS_HPP_

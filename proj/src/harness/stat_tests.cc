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

#include "lossless/harness/stat_tests.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

namespace lossless::stats {
namespace {

TestResult chi_square_result(double stat, int dof) {
  TestResult r;
  r.statistic = stat;
  r.dof = dof;
  r.p_value = dof > 0 ? boost::math::gamma_q(0.5 * dof, 0.5 * stat) : 1.0;
  return r;
}

}  // namespace

double kolmogorov_survival(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 0.3) {
    // Small-lambda form of the same series.
    const double c = std::sqrt(2.0 * M_PI) / lambda;
    double s = 0.0;
    for (int k = 1; k <= 50; ++k) {
      const double t = (2 * k - 1) * M_PI / lambda;
      s += std::exp(-t * t / 8.0);
    }
    return std::clamp(1.0 - c * s, 0.0, 1.0);
  }
  double s = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    s += (k % 2 == 1 ? term : -term);
    if (term < 1e-18) break;
  }
  return std::clamp(2.0 * s, 0.0, 1.0);
}

TestResult ks_one_sample(std::vector<double> sample,
                         const std::function<double(double)>& cdf) {
  if (sample.empty()) throw std::invalid_argument("empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  const double sn = std::sqrt(n);
  return {d, kolmogorov_survival((sn + 0.12 + 0.11 / sn) * d), 0};
}

TestResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double ne = std::sqrt(na * nb / (na + nb));
  return {d, kolmogorov_survival((ne + 0.12 + 0.11 / ne) * d), 0};
}

TestResult chi_square_gof(const std::vector<double>& observed,
                          const std::vector<double>& probs, double overflow) {
  if (observed.size() != probs.size() || observed.empty()) {
    throw std::invalid_argument("observed and probabilities differ in length");
  }
  double total = std::accumulate(observed.begin(), observed.end(), overflow);
  std::vector<double> obs(observed);
  std::vector<double> expct(probs.size());
  double listed = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    expct[i] = probs[i] * total;
    listed += probs[i];
  }
  const double rest = std::max(0.0, 1.0 - listed);
  if (rest * total > 0.0 || overflow > 0.0) {
    obs.push_back(overflow);
    expct.push_back(rest * total);
  }

  std::vector<double> po;
  std::vector<double> pe;
  double acc_o = 0.0;
  double acc_e = 0.0;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    acc_o += obs[i];
    acc_e += expct[i];
    if (acc_e >= 5.0) {
      po.push_back(acc_o);
      pe.push_back(acc_e);
      acc_o = acc_e = 0.0;
    }
  }
  if (acc_e > 0.0 || acc_o > 0.0) {
    if (pe.empty()) {
      po.push_back(acc_o);
      pe.push_back(acc_e);
    } else {
      po.back() += acc_o;
      pe.back() += acc_e;
    }
  }
  double stat = 0.0;
  for (std::size_t i = 0; i < po.size(); ++i) {
    if (pe[i] > 0.0) {
      stat += (po[i] - pe[i]) * (po[i] - pe[i]) / pe[i];
    } else if (po[i] > 0.0) {
      return {std::numeric_limits<double>::infinity(), 0.0, 0};
    }
  }
  return chi_square_result(stat, static_cast<int>(po.size()) - 1);
}

TestResult chi_square_homogeneity(const std::vector<double>& a,
                                  const std::vector<double>& b) {
  if (a.size() != b.size() || a.empty()) {
    throw std::invalid_argument("rows differ in length");
  }
  const double ta = std::accumulate(a.begin(), a.end(), 0.0);
  const double tb = std::accumulate(b.begin(), b.end(), 0.0);
  const double t = ta + tb;
  if (!(ta > 0.0) || !(tb > 0.0)) throw std::invalid_argument("empty row");
  const double small = std::min(ta, tb) / t;

  std::vector<double> pa;
  std::vector<double> pb;
  double acc_a = 0.0;
  double acc_b = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    acc_a += a[i];
    acc_b += b[i];
    if ((acc_a + acc_b) * small >= 5.0) {
      pa.push_back(acc_a);
      pb.push_back(acc_b);
      acc_a = acc_b = 0.0;
    }
  }
  if (acc_a + acc_b > 0.0) {
    if (pa.empty()) {
      pa.push_back(acc_a);
      pb.push_back(acc_b);
    } else {
      pa.back() += acc_a;
      pb.back() += acc_b;
    }
  }
  double stat = 0.0;
  for (std::size_t i = 0; i < pa.size(); ++i) {
    const double col = pa[i] + pb[i];
    const double ea = col * ta / t;
    const double eb = col * tb / t;
    stat += (pa[i] - ea) * (pa[i] - ea) / ea + (pb[i] - eb) * (pb[i] - eb) / eb;
  }
  return chi_square_result(stat, static_cast<int>(pa.size()) - 1);
}

double mean(const std::vector<double>& x) {
  if (x.empty()) throw std::invalid_argument("empty sample");
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double variance(const std::vector<double>& x) {
  if (x.size() < 2) throw std::invalid_argument("need two values");
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

CovarianceEstimate covariance(const Eigen::MatrixXd& samples) {
  const Eigen::Index n = samples.rows();
  const Eigen::Index p = samples.cols();
  if (n < 2) throw std::invalid_argument("need two trials");
  const Eigen::RowVectorXd mu = samples.colwise().mean();
  const Eigen::MatrixXd centered = samples.rowwise() - mu;
  CovarianceEstimate out;
  out.cov = centered.transpose() * centered / static_cast<double>(n - 1);
  out.se.resize(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = i; j < p; ++j) {
      const Eigen::ArrayXd prod = centered.col(i).array() * centered.col(j).array();
      const double m = prod.mean();
      const double var = (prod - m).square().sum() / static_cast<double>(n - 1);
      out.se(i, j) = out.se(j, i) = std::sqrt(var / static_cast<double>(n));
    }
  }
  return out;
}

void Moments::add(double x) {
  ++n_;
  const double delta = x - mean_;
  mean_ += delta / static_cast<double>(n_);
  m2_ += delta * (x - mean_);
}

void Moments::merge(const Moments& other) {
  if (other.n_ == 0) return;
  if (n_ == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(n_);
  const double nb = static_cast<double>(other.n_);
  const double delta = other.mean_ - mean_;
  mean_ += delta * nb / (na + nb);
  m2_ += other.m2_ + delta * delta * na * nb / (na + nb);
  n_ += other.n_;
}

}  // namespace lossless::stats

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

#include "lossless/noise_core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/special_functions/erf.hpp>

namespace lossless {
namespace {

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

double log_or_neg_inf(double x) { return x > 0.0 ? std::log(x) : -kInfinity; }

double log1m_or_neg_inf(double x) {
  return x < 1.0 ? std::log1p(-x) : -kInfinity;
}

LaplaceMixtureWeights normalize_log_weights(double l0, double lk, double lh) {
  const double top = std::max({l0, lk, lh});
  if (!(top > -kInfinity)) {
    throw NumericalError("conditioning event has zero density");
  }
  const double w0 = std::exp(l0 - top);
  const double wk = std::exp(lk - top);
  const double wh = std::exp(lh - top);
  const double total = w0 + wk + wh;
  return {w0 / total, wk / total, wh / total};
}

double log_laplace_density(double scale, double x) {
  return -std::log(2.0 * scale) - std::abs(x) / scale;
}

double log_laplace_conv_density(double s1, double s2, double t) {
  const double at = std::abs(t);
  if (s1 == s2) {
    return std::log((s1 + at) / (4.0 * s1 * s1)) - at / s1;
  }
  const double big = std::max(s1, s2);
  const double small = std::min(s1, s2);
  // (big e^{-|t|/big} - small e^{-|t|/small}) / (2 (big² - small²))
  const double gap = at * (1.0 / small - 1.0 / big);
  return -at / big + std::log(big - small * std::exp(-gap)) -
         std::log(2.0 * (big * big - small * small));
}

double log_exponential_density(double rate, double x) {
  return std::log(rate) - rate * x;
}

double log_exponential_conv_density(double r1, double r2, double t) {
  if (t <= 0.0) return -kInfinity;
  if (r1 == r2) return 2.0 * std::log(r1) + std::log(t) - r1 * t;
  const double hi = std::max(r1, r2);
  const double lo = std::min(r1, r2);
  return std::log(r1) + std::log(r2) - lo * t +
         std::log(-std::expm1(-(hi - lo) * t)) - std::log(hi - lo);
}

}  // namespace

void validate(const GaussianSpec& spec) {
  if (!std::isfinite(spec.mean) || !std::isfinite(spec.variance) ||
      spec.variance < 0.0) {
    throw DomainError("gaussian variance must be finite and non-negative");
  }
}

void validate(const LaplaceSpec& spec) {
  if (!(spec.scale > 0.0) || !std::isfinite(spec.scale)) {
    throw DomainError("laplace scale must be positive");
  }
}

void validate(const PoissonSpec& spec) {
  if (!(spec.rate > 0.0) || !std::isfinite(spec.rate)) {
    throw DomainError("poisson rate must be positive");
  }
}

void validate(const ExponentialSpec& spec) {
  if (!(spec.rate > 0.0) || !std::isfinite(spec.rate)) {
    throw DomainError("exponential rate must be positive");
  }
}

double normal_upper_tail(double x) {
  if (x == kInfinity) return 0.0;
  if (x == -kInfinity) return 1.0;
  return 0.5 * boost::math::erfc(x / std::numbers::sqrt2);
}

double normal_lower_tail(double x) { return normal_upper_tail(-x); }

double normal_upper_quantile(double q) {
  if (!(q >= 0.0 && q <= 1.0)) throw DomainError("quantile outside [0, 1]");
  if (q == 0.0) return kInfinity;
  if (q == 1.0) return -kInfinity;
  return std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * q);
}

double normal_density(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

GaussianSpec gaussian_bridge(double rho_l, double rho, double rho_r,
                             double delta2) {
  if (!(delta2 > 0.0) || !std::isfinite(delta2)) {
    throw DomainError("sensitivity must be positive");
  }
  if (!(rho_l >= 0.0) || !(rho > 0.0) || !std::isfinite(rho) ||
      rho < rho_l || rho > rho_r) {
    throw DomainError("bridge requires 0 <= rho_l <= rho <= rho_r");
  }
  if (rho == rho_l || rho == rho_r) return {0.0, 0.0};
  const double inv_r = std::isinf(rho_r) ? 0.0 : 1.0 / rho_r;
  const double ratio_r = rho_l * inv_r;  // rho_l / rho_r
  double variance = delta2 * delta2 * (1.0 - rho_l / rho) *
                    (1.0 / rho - inv_r) / (2.0 * (1.0 - ratio_r));
  if (variance < 0.0) {
    if (variance < -1e-12) {
      throw DomainError("bridge variance is negative");
    }
    variance = 0.0;
  }
  return {0.0, variance};
}

CombineWeights gaussian_combine_weights(double rho_l, double rho,
                                        double rho_r) {
  if (!(rho_l >= 0.0) || !(rho > 0.0) || !std::isfinite(rho) ||
      rho < rho_l || rho > rho_r) {
    throw DomainError("combine weights require 0 <= rho_l <= rho <= rho_r");
  }
  if (rho == rho_l) return {1.0, 0.0};
  if (rho == rho_r) return {0.0, 1.0};
  const double inv_r = std::isinf(rho_r) ? 0.0 : 1.0 / rho_r;
  const double denom = 1.0 - rho_l * inv_r;
  const double right = (1.0 - rho_l / rho) / denom;
  const double left = (rho_l / rho - rho_l * inv_r) / denom;
  return {left, right};
}

double laplace_density(double scale, double x) {
  validate(LaplaceSpec{scale});
  return std::exp(-std::abs(x) / scale) / (2.0 * scale);
}

double laplace_cdf(double scale, double x) {
  validate(LaplaceSpec{scale});
  if (x < 0.0) return 0.5 * std::exp(x / scale);
  return 1.0 - 0.5 * std::exp(-x / scale);
}

double laplace_conv_density(double b1, double b2, double t) {
  validate(LaplaceSpec{b1});
  validate(LaplaceSpec{b2});
  if (b1 == b2) throw DomainError("laplace convolution requires b1 != b2");
  const double at = std::abs(t);
  return (b1 * std::exp(-at / b1) - b2 * std::exp(-at / b2)) /
         (2.0 * (b1 * b1 - b2 * b2));
}

LaplaceMixtureWeights split_weights(AtomicLaplace first, AtomicLaplace second,
                                    double k) {
  if (!is_probability(first.atom) || !is_probability(second.atom)) {
    throw DomainError("atom probabilities must lie in [0, 1]");
  }
  validate(LaplaceSpec{first.scale});
  validate(LaplaceSpec{second.scale});
  if (!std::isfinite(k)) throw DomainError("conditioning value must be finite");
  // Both atoms firing is the only way to hit 0 with positive probability.
  if (k == 0.0 && first.atom > 0.0 && second.atom > 0.0) return {1.0, 0.0, 0.0};

  const double l0 = log_or_neg_inf(first.atom) +
                    log1m_or_neg_inf(second.atom) +
                    log_laplace_density(second.scale, k);
  const double lk = log1m_or_neg_inf(first.atom) +
                    log_or_neg_inf(second.atom) +
                    log_laplace_density(first.scale, k);
  const double lh = log1m_or_neg_inf(first.atom) +
                    log1m_or_neg_inf(second.atom) +
                    log_laplace_conv_density(first.scale, second.scale, k);
  return normalize_log_weights(l0, lk, lh);
}

LaplaceMixtureWeights laplace_conditional_weights(double b, double b2,
                                                  double b1, double k) {
  if (!(b2 > 0.0) || !(b2 < b) || !(b < b1) || !std::isfinite(b1)) {
    throw DomainError("laplace conditional requires 0 < b2 < b < b1");
  }
  const AtomicLaplace first{(b2 / b) * (b2 / b), b};
  const AtomicLaplace second{(b / b1) * (b / b1), b1};
  return split_weights(first, second, k);
}

double exponential_cdf(double rate, double x) {
  validate(ExponentialSpec{rate});
  return x <= 0.0 ? 0.0 : -std::expm1(-rate * x);
}

LaplaceMixtureWeights split_weights(AtomicExponential first,
                                    AtomicExponential second, double k) {
  if (!is_probability(first.atom) || !is_probability(second.atom)) {
    throw DomainError("atom probabilities must lie in [0, 1]");
  }
  validate(ExponentialSpec{first.rate});
  validate(ExponentialSpec{second.rate});
  if (!(k >= 0.0) || !std::isfinite(k)) {
    throw DomainError("exponential split requires finite k >= 0");
  }
  if (k == 0.0 && first.atom > 0.0 && second.atom > 0.0) return {1.0, 0.0, 0.0};

  const double l0 = log_or_neg_inf(first.atom) +
                    log1m_or_neg_inf(second.atom) +
                    log_exponential_density(second.rate, k);
  const double lk = log1m_or_neg_inf(first.atom) +
                    log_or_neg_inf(second.atom) +
                    log_exponential_density(first.rate, k);
  const double lh = log1m_or_neg_inf(first.atom) +
                    log1m_or_neg_inf(second.atom) +
                    log_exponential_conv_density(first.rate, second.rate, k);
  return normalize_log_weights(l0, lk, lh);
}

LaplaceMixtureWeights exponential_conditional_weights(double lambda_left,
                                                      double lambda,
                                                      double lambda_right,
                                                      double k) {
  if (!(lambda_left > 0.0) || !(lambda_left < lambda) ||
      !(lambda < lambda_right) || !std::isfinite(lambda_right)) {
    throw DomainError(
        "exponential conditional requires 0 < lambda_left < lambda < "
        "lambda_right");
  }
  const AtomicExponential first{lambda / lambda_right, lambda};
  const AtomicExponential second{lambda_left / lambda, lambda_left};
  return split_weights(first, second, k);
}

std::vector<double> poisson_conditional_pmf(double lambda1, double lambda2,
                                            std::int64_t k) {
  if (!(lambda1 > 0.0) || !(lambda2 > 0.0)) {
    throw DomainError("poisson conditional requires positive rates");
  }
  if (k < 0) throw DomainError("poisson conditional requires k >= 0");
  const double p = lambda1 / (lambda1 + lambda2);
  const double log_p = std::log(p);
  const double log_q = std::log1p(-p);
  const double kd = static_cast<double>(k);
  std::vector<double> pmf(static_cast<std::size_t>(k) + 1);
  for (std::int64_t x = 0; x <= k; ++x) {
    const double xd = static_cast<double>(x);
    const double log_choose =
        std::lgamma(kd + 1.0) - std::lgamma(xd + 1.0) - std::lgamma(kd - xd + 1.0);
    pmf[static_cast<std::size_t>(x)] =
        std::exp(log_choose + xd * log_p + (kd - xd) * log_q);
  }
  return pmf;
}

}  // namespace lossless

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

// Noise families that satisfy a convolution preorder, their bridging
// distributions, and the conditional samplers used to place a new release
// between two existing ones.
//
// Parameterizations used throughout the library (Δ is the query
// sensitivity):
//   Gaussian     variance  Δ² / (2ρ)
//   Laplace      scale b = Δ / ρ
//   Poisson      rate  λ = 1 / ρ
//   Exponential  rate  λ = ρ / Δ

#ifndef LOSSLESS_NOISE_CORE_HPP_
#define LOSSLESS_NOISE_CORE_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "lossless/errors.hpp"
#include "lossless/random.hpp"

namespace lossless {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct GaussianSpec {
  double mean = 0.0;
  double variance = 1.0;  // zero denotes a point mass at `mean`
};

struct LaplaceSpec {
  double scale = 1.0;
};

struct PoissonSpec {
  double rate = 1.0;
};

struct ExponentialSpec {
  double rate = 1.0;
};

// Branch probabilities of a two-piece split conditioned on its sum k:
// first piece equal to 0, first piece equal to k, both pieces continuous.
struct LaplaceMixtureWeights {
  double p0 = 0.0;
  double pk = 0.0;
  double pH = 0.0;
};

// 0 with probability `atom`, otherwise Lap(0, scale).
struct AtomicLaplace {
  double atom;
  double scale;
};

// 0 with probability `atom`, otherwise Exp(rate).
struct AtomicExponential {
  double atom;
  double rate;
};

void validate(const GaussianSpec& spec);
void validate(const LaplaceSpec& spec);
void validate(const PoissonSpec& spec);
void validate(const ExponentialSpec& spec);

// ---------------------------------------------------------------------------
// Standard normal tails, accurate far into both tails.

double normal_upper_tail(double x);   // Pr[N(0,1) > x]
double normal_lower_tail(double x);   // Pr[N(0,1) <= x]
double normal_upper_quantile(double q);  // x such that Pr[N(0,1) > x] = q
double normal_density(double x);

// ---------------------------------------------------------------------------
// Gaussian multiple release.

// Distribution of the fresh noise added when a release at `rho` is placed
// between neighbours at rho_l < rho < rho_r. rho_l may be 0 (no less-accurate
// neighbour) and rho_r may be +infinity (the neighbour is the exact value).
GaussianSpec gaussian_bridge(double rho_l, double rho, double rho_r,
                             double delta2);

struct CombineWeights {
  double left = 0.0;
  double right = 0.0;
};

// Weights on the left (noisier) and right neighbour; they sum to one.
CombineWeights gaussian_combine_weights(double rho_l, double rho, double rho_r);

// ---------------------------------------------------------------------------
// Laplace.

double laplace_density(double scale, double x);
double laplace_cdf(double scale, double x);

// Density of Lap(0, b1) + Lap(0, b2) at t; b1 != b2.
double laplace_conv_density(double b1, double b2, double t);

// Conditional law of the first piece given first + second = k, for
// independent zero-inflated Laplace pieces. k == 0 returns p0 = 1.
LaplaceMixtureWeights split_weights(AtomicLaplace first, AtomicLaplace second,
                                    double k);

// Placing scale b between neighbours b2 < b < b1: the first piece is the
// bridge from b2 to b, the second the bridge from b to b1, and k is the
// difference between the noisier and the less noisy neighbour release.
LaplaceMixtureWeights laplace_conditional_weights(double b, double b2,
                                                  double b1, double k);

// ---------------------------------------------------------------------------
// Exponential and Poisson.

double exponential_cdf(double rate, double x);

LaplaceMixtureWeights split_weights(AtomicExponential first,
                                    AtomicExponential second, double k);

// Placing rate lambda between neighbours lambda_left < lambda < lambda_right.
LaplaceMixtureWeights exponential_conditional_weights(double lambda_left,
                                                      double lambda,
                                                      double lambda_right,
                                                      double k);

// Pmf of X1 | X1 + X2 = k for independent Poi(lambda1), Poi(lambda2),
// indexed 0..k.
std::vector<double> poisson_conditional_pmf(double lambda1, double lambda2,
                                            std::int64_t k);

// ---------------------------------------------------------------------------
// Samplers.

namespace detail {

// x in [0, width] with density proportional to exp(-slope * x).
template <std::uniform_random_bit_generator G>
double sample_exponential_slope(double slope, double width, G& gen) {
  const double u = open_unit(gen);
  const double c = std::abs(slope);
  if (c * width < 1e-12) return u * width;
  const double y = -std::log1p(u * std::expm1(-c * width)) / c;
  return slope > 0.0 ? y : width - y;
}

// Far upper tail of N(0,1) beyond `a` by exponential-proposal rejection.
template <std::uniform_random_bit_generator G>
double sample_normal_tail(double a, G& gen) {
  const double alpha = 0.5 * (a + std::sqrt(a * a + 4.0));
  for (;;) {
    const double z = a - std::log(open_unit(gen)) / alpha;
    const double d = z - alpha;
    if (open_unit(gen) <= std::exp(-0.5 * d * d)) return z;
  }
}

inline void require_ordered(double lo, double hi, const char* what) {
  if (!(lo > 0.0) || !(lo < hi) || !std::isfinite(hi)) {
    throw DomainError(what);
  }
}

}  // namespace detail

template <std::uniform_random_bit_generator G>
double sample_gaussian(const GaussianSpec& spec, G& gen) {
  validate(spec);
  if (spec.variance == 0.0) return spec.mean;
  std::normal_distribution<double> normal(spec.mean, std::sqrt(spec.variance));
  return normal(gen);
}

template <std::uniform_random_bit_generator G>
double sample_laplace(const LaplaceSpec& spec, G& gen) {
  validate(spec);
  std::exponential_distribution<double> expo(1.0 / spec.scale);
  std::bernoulli_distribution sign(0.5);
  const double magnitude = expo(gen);
  return sign(gen) ? magnitude : -magnitude;
}

template <std::uniform_random_bit_generator G>
std::int64_t sample_poisson(const PoissonSpec& spec, G& gen) {
  validate(spec);
  std::poisson_distribution<std::int64_t> poisson(spec.rate);
  return poisson(gen);
}

template <std::uniform_random_bit_generator G>
double sample_exponential(const ExponentialSpec& spec, G& gen) {
  validate(spec);
  std::exponential_distribution<double> expo(spec.rate);
  return expo(gen);
}

// Lap(0, b_small) plus this sample is distributed Lap(0, b_large).
template <std::uniform_random_bit_generator G>
double sample_laplace_bridge(double b_small, double b_large, G& gen) {
  detail::require_ordered(b_small, b_large,
                          "laplace bridge requires 0 < b_small < b_large");
  const double atom = (b_small / b_large) * (b_small / b_large);
  if (open_unit(gen) < atom) return 0.0;
  return sample_laplace(LaplaceSpec{b_large}, gen);
}

// Draw from the density proportional to f_b(x) · f_b2(k - x). On each of
// (-inf, min(0,k)), [min(0,k), max(0,k)], (max(0,k), inf) the product is a
// pure exponential, so the draw is an exact inverse CDF.
template <std::uniform_random_bit_generator G>
double sample_laplace_product(double b, double b2, double k, G& gen) {
  if (!(b > 0.0) || !(b2 > 0.0) || !std::isfinite(k)) {
    throw DomainError("laplace product requires positive scales, finite k");
  }
  if (k < 0.0) return -sample_laplace_product(b, b2, -k, gen);

  const double outer = 1.0 / b + 1.0 / b2;
  const double inner = 1.0 / b2 - 1.0 / b;  // log-slope on [0, k]
  const double log_left = -k / b2 - std::log(outer);
  const double log_right = -k / b - std::log(outer);
  double log_mid = -kInfinity;
  if (k > 0.0) {
    const double ak = inner * k;
    if (std::abs(ak) < 1e-12) {
      log_mid = -k / b2 + std::log(k);
    } else if (inner > 0.0) {
      log_mid = -k / b2 + ak + std::log(-std::expm1(-ak)) - std::log(inner);
    } else {
      log_mid = -k / b2 + std::log(-std::expm1(ak)) - std::log(-inner);
    }
  }
  const double top = std::max({log_left, log_mid, log_right});
  const double w_left = std::exp(log_left - top);
  const double w_mid = std::exp(log_mid - top);
  const double w_right = std::exp(log_right - top);
  const double pick = open_unit(gen) * (w_left + w_mid + w_right);
  if (pick < w_left) return std::log(open_unit(gen)) / outer;
  if (pick < w_left + w_mid) {
    return detail::sample_exponential_slope(-inner, k, gen);
  }
  return k - std::log(open_unit(gen)) / outer;
}

// Conditional draw of the bridge piece from b2 to b given that it and the
// bridge piece from b to b1 sum to k.
template <std::uniform_random_bit_generator G>
double sample_laplace_conditional(double b, double b2, double b1, double k,
                                  G& gen) {
  const LaplaceMixtureWeights w = laplace_conditional_weights(b, b2, b1, k);
  if (k == 0.0) return 0.0;
  const double u = open_unit(gen);
  if (u < w.p0) return 0.0;
  if (u < w.p0 + w.pk) return k;
  return sample_laplace_product(b, b1, k, gen);
}

template <std::uniform_random_bit_generator G>
std::int64_t sample_poisson_bridge(double lambda_high, double lambda_low,
                                   G& gen) {
  detail::require_ordered(lambda_low, lambda_high,
                          "poisson bridge requires lambda_high > lambda_low > 0");
  return sample_poisson(PoissonSpec{lambda_high - lambda_low}, gen);
}

template <std::uniform_random_bit_generator G>
std::int64_t sample_poisson_conditional(double lambda1, double lambda2,
                                        std::int64_t k, G& gen) {
  if (!(lambda1 > 0.0) || !(lambda2 > 0.0)) {
    throw DomainError("poisson conditional requires positive rates");
  }
  if (k < 0) throw DomainError("poisson conditional requires k >= 0");
  std::binomial_distribution<std::int64_t> binomial(
      k, lambda1 / (lambda1 + lambda2));
  return binomial(gen);
}

// Exp(lambda2) plus this sample is distributed Exp(lambda1), lambda1 < lambda2.
template <std::uniform_random_bit_generator G>
double sample_exponential_bridge(double lambda1, double lambda2, G& gen) {
  detail::require_ordered(lambda1, lambda2,
                          "exponential bridge requires 0 < lambda1 < lambda2");
  if (open_unit(gen) < lambda1 / lambda2) return 0.0;
  return sample_exponential(ExponentialSpec{lambda1}, gen);
}

// Conditional draw of the bridge piece from lambda_right to lambda given that
// it and the piece from lambda to lambda_left sum to k >= 0.
template <std::uniform_random_bit_generator G>
double sample_exponential_conditional(double lambda_left, double lambda,
                                      double lambda_right, double k, G& gen) {
  const LaplaceMixtureWeights w =
      exponential_conditional_weights(lambda_left, lambda, lambda_right, k);
  if (k <= 0.0) return 0.0;
  const double u = open_unit(gen);
  if (u < w.p0) return 0.0;
  if (u < w.p0 + w.pk) return k;
  return detail::sample_exponential_slope(lambda - lambda_left, k, gen);
}

// N(mean, variance) conditioned on (lower, upper]. Inverse CDF over the
// conditioned quantile range, evaluated on whichever tail keeps precision;
// one-sided intervals beyond 8 standard deviations use exact rejection.
template <std::uniform_random_bit_generator G>
double sample_truncated_gaussian(const GaussianSpec& spec, double lower,
                                 double upper, G& gen) {
  validate(spec);
  if (!(spec.variance > 0.0)) {
    throw DomainError("truncated gaussian requires positive variance");
  }
  if (!(lower < upper)) throw DomainError("truncation requires lower < upper");
  const double sd = std::sqrt(spec.variance);
  const double a = (lower - spec.mean) / sd;
  const double b = (upper - spec.mean) / sd;

  double z;
  if (a == -kInfinity && b == kInfinity) {
    std::normal_distribution<double> normal;
    z = normal(gen);
  } else if (a >= 0.0 || b <= 0.0) {
    // One-sided: reflect the lower side so the interval lies in the upper
    // tail, where upper-tail probabilities do not cancel.
    const bool mirrored = b <= 0.0;
    const double lo = mirrored ? -b : a;
    const double hi = mirrored ? -a : b;
    if (lo > 8.0 && hi == kInfinity) {
      z = detail::sample_normal_tail(lo, gen);
    } else {
      const double q_lo = normal_upper_tail(lo);
      const double q_hi = normal_upper_tail(hi);
      if (!(q_lo - q_hi >= 1e-300)) {
        throw NumericalError("truncation interval has no representable mass");
      }
      z = normal_upper_quantile(q_hi + open_unit(gen) * (q_lo - q_hi));
      z = std::clamp(z, lo, hi);
    }
    if (mirrored) z = -z;
  } else {
    const double p_lo = normal_lower_tail(a);
    const double p_hi = normal_lower_tail(b);
    const double p = p_lo + open_unit(gen) * (p_hi - p_lo);
    z = -normal_upper_quantile(p);
    z = std::clamp(z, a, b);
  }
  double x = spec.mean + sd * z;
  if (x <= lower) x = std::nextafter(lower, kInfinity);
  if (x > upper) x = upper;
  return x;
}

}  // namespace lossless

#endif  // LOSSLESS_NOISE_CORE_HPP_

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

// Closed-form reference laws for the statistical checks. These are written
// out directly so that a check never trusts the library's own formulas.

#ifndef LOSSLESS_SRC_HARNESS_ORACLES_HPP_
#define LOSSLESS_SRC_HARNESS_ORACLES_HPP_

#include <cmath>
#include <cstdint>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

namespace lossless::oracle {

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }
inline double normal_sf(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

inline double laplace_cdf(double b, double x) {
  return x < 0.0 ? 0.5 * std::exp(x / b) : 1.0 - 0.5 * std::exp(-x / b);
}

inline double exponential_cdf(double rate, double x) {
  return x <= 0.0 ? 0.0 : 1.0 - std::exp(-rate * x);
}

// Poi(lambda) pmf at 0..kmax by the ratio recurrence.
inline std::vector<double> poisson_pmf(double lambda, int kmax) {
  std::vector<double> p(kmax + 1);
  p[0] = std::exp(-lambda);
  for (int k = 1; k <= kmax; ++k) p[k] = p[k - 1] * lambda / k;
  return p;
}

// Sample sizes and tolerances for the full and the reduced run.
struct Scale {
  bool quick = false;
  std::int64_t pick(std::int64_t full, std::int64_t reduced) const {
    return quick ? reduced : full;
  }
  // A relative tolerance fixed at size `full`, widened by sqrt(full / used).
  static double widen(double tol, std::int64_t full, std::int64_t used) {
    return tol * std::sqrt(static_cast<double>(full) / static_cast<double>(used));
  }
};

inline std::string fmt(double x, int digits = 4) {
  std::ostringstream out;
  out << std::setprecision(digits) << x;
  return out.str();
}

}  // namespace lossless::oracle

#endif  // LOSSLESS_SRC_HARNESS_ORACLES_HPP_

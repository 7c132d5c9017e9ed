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

// Variance of gradual releases over a log-spaced budget grid: one lossless
// ledger against a fresh independent release at each step.

#ifndef LOSSLESS_HARNESS_FIG2_HPP_
#define LOSSLESS_HARNESS_FIG2_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace lossless::fig2 {

enum class Mode { kIndependent, kLossless };

std::string_view mode_name(Mode mode);

struct ExperimentConfig {
  std::vector<double> rho_grid;  // strictly increasing
  std::int64_t repetitions = 1000000;
  std::uint64_t seed = 0;
  std::vector<Mode> modes = {Mode::kIndependent, Mode::kLossless};
  double sensitivity = 1.0;
};

struct Row {
  double rho = 0.0;
  Mode mode = Mode::kLossless;
  int n_releases = 0;
  double empirical_variance = 0.0;
  double theoretical_variance = 0.0;
};

// n points evenly spaced in log between lo and hi inclusive.
std::vector<double> log_grid(double lo, double hi, int n);

// Independent mode spends ρ_j − ρ_{j−1} on the j-th release, so the total
// spent after j releases is ρ_j; lossless mode releases at ρ_j from one
// ledger. Rows are ordered by ρ, then mode.
std::vector<Row> run_fig2(const ExperimentConfig& config);

std::string format_csv(const std::vector<Row>& rows);
std::string format_json(const std::vector<Row>& rows);

}  // namespace lossless::fig2

#endif  // LOSSLESS_HARNESS_FIG2_HPP_

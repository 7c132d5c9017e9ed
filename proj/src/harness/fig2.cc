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

#include "lossless/harness/fig2.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "lossless/errors.hpp"
#include "lossless/harness/stat_tests.hpp"
#include "lossless/random.hpp"
#include "lossless/release_engine.hpp"

namespace lossless::fig2 {
namespace {

constexpr std::int64_t kBlock = 10000;

void check_config(const ExperimentConfig& config) {
  if (config.rho_grid.empty()) throw DomainError("empty budget grid");
  double prev = 0.0;
  for (double rho : config.rho_grid) {
    if (!(rho > prev) || !std::isfinite(rho)) {
      throw DomainError("budget grid must be positive and strictly increasing");
    }
    prev = rho;
  }
  if (config.repetitions < 1) throw DomainError("repetitions must be at least 1");
  if (!(config.sensitivity > 0.0)) throw DomainError("sensitivity must be positive");
}

}  // namespace

std::string_view mode_name(Mode mode) {
  return mode == Mode::kLossless ? "lossless" : "independent";
}

std::vector<double> log_grid(double lo, double hi, int n) {
  if (!(lo > 0.0) || !(hi >= lo) || n < 1) throw DomainError("bad grid");
  if (n == 1) return {hi};
  std::vector<double> g(n);
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (int i = 0; i < n; ++i) g[i] = std::exp(a + (b - a) * i / (n - 1));
  g.front() = lo;
  g.back() = hi;
  return g;
}

std::vector<Row> run_fig2(const ExperimentConfig& config) {
  check_config(config);
  const std::vector<double>& grid = config.rho_grid;
  const std::size_t m = grid.size();
  const double d2 = config.sensitivity * config.sensitivity;
  const bool want_ind = std::find(config.modes.begin(), config.modes.end(),
                                  Mode::kIndependent) != config.modes.end();
  const bool want_loss = std::find(config.modes.begin(), config.modes.end(),
                                   Mode::kLossless) != config.modes.end();

  std::vector<stats::Moments> ind(m);
  std::vector<stats::Moments> loss(m);
  std::vector<double> ind_sd(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double spent = grid[j] - (j ? grid[j - 1] : 0.0);
    ind_sd[j] = std::sqrt(d2 / (2.0 * spent));
  }

  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(1);
  for (std::int64_t start = 0, block = 0; start < config.repetitions;
       start += kBlock, ++block) {
    const std::int64_t count = std::min(kBlock, config.repetitions - start);
    if (want_ind) {
      RandomSource gen = make_substream(config.seed, 2 * block);
      std::normal_distribution<double> normal;
      std::vector<stats::Moments> part(m);
      for (std::int64_t t = 0; t < count; ++t) {
        for (std::size_t j = 0; j < m; ++j) part[j].add(ind_sd[j] * normal(gen));
      }
      for (std::size_t j = 0; j < m; ++j) ind[j].merge(part[j]);
    }
    if (want_loss) {
      RandomSource gen = make_substream(config.seed, 2 * block + 1);
      std::vector<stats::Moments> part(m);
      for (std::int64_t t = 0; t < count; ++t) {
        Ledger ledger = Ledger::create(zero, config.sensitivity,
                                       Mechanism::kGaussian, kInfinity, gen);
        for (std::size_t j = 0; j < m; ++j) {
          part[j].add(ledger.release(grid[j], gen)[0]);
        }
      }
      for (std::size_t j = 0; j < m; ++j) loss[j].merge(part[j]);
    }
  }

  std::vector<Row> rows;
  for (std::size_t j = 0; j < m; ++j) {
    const int n = static_cast<int>(j + 1);
    if (want_ind) {
      rows.push_back({grid[j], Mode::kIndependent, n, ind[j].variance(),
                      ind_sd[j] * ind_sd[j]});
    }
    if (want_loss) {
      rows.push_back({grid[j], Mode::kLossless, n, loss[j].variance(),
                      d2 / (2.0 * grid[j])});
    }
  }
  return rows;
}

std::string format_csv(const std::vector<Row>& rows) {
  std::ostringstream out;
  out.precision(17);
  out << "rho,mode,n_releases,empirical_variance,theoretical_variance\n";
  for (const Row& r : rows) {
    out << r.rho << ',' << mode_name(r.mode) << ',' << r.n_releases << ','
        << r.empirical_variance << ',' << r.theoretical_variance << '\n';
  }
  return out.str();
}

std::string format_json(const std::vector<Row>& rows) {
  nlohmann::json doc = nlohmann::json::array();
  for (const Row& r : rows) {
    doc.push_back({{"rho", r.rho},
                   {"mode", std::string(mode_name(r.mode))},
                   {"n_releases", r.n_releases},
                   {"empirical_variance", r.empirical_variance},
                   {"theoretical_variance", r.theoretical_variance}});
  }
  return doc.dump(2) + "\n";
}

}  // namespace lossless::fig2

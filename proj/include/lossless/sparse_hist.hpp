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

// Gradual release of thresholded Gaussian histograms. The naive path adds
// dense noise to every coordinate; the efficient path only touches counts
// that are nonzero or have been released before, and simulates how many
// untouched zero counts cross the threshold in each round.

#ifndef LOSSLESS_SPARSE_HIST_HPP_
#define LOSSLESS_SPARSE_HIST_HPP_

#include <cstdint>
#include <map>
#include <memory>
#include <variant>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "lossless/noise_core.hpp"
#include "lossless/random.hpp"

namespace lossless {

struct Histogram {
  Eigen::Index dimension = 0;
  std::map<Eigen::Index, std::int64_t> counts;  // nonzero entries only

  static Histogram make(Eigen::Index dimension,
                        std::map<Eigen::Index, std::int64_t> counts);
  Eigen::Index support_size() const {
    return static_cast<Eigen::Index>(counts.size());
  }
  double count(Eigen::Index i) const;
  Eigen::VectorXd dense() const;
};

struct NaiveHistState {
  double rho_prev = 0.0;
  Eigen::VectorXd z_prev;  // aggregate noise after the last round
};

// Y_i = H_i + Z_i where that exceeds tau, else 0.
Eigen::VectorXd naive_release(const Histogram& hist, NaiveHistState& state,
                              double rho, double tau, double delta2,
                              RandomSource& gen);

// Law of the scaled noise sum S_r = ρ_r Z_r of one coordinate, whose
// increments are N(0, Δ²(ρ_ℓ − ρ_{ℓ−1})/2), killed whenever S_ℓ > ρ_ℓ τ_ℓ.
// The surviving density is carried on a uniform grid and propagated with a
// cell-integrated Gaussian kernel.
class CrossingModel {
 public:
  static constexpr int kDefaultNodes = 1 << 14;

  CrossingModel(std::vector<double> budgets, std::vector<double> thresholds,
                double delta2, int nodes = kDefaultNodes);

  int rounds() const { return static_cast<int>(budgets_.size()); }
  double delta2() const { return delta2_; }
  const std::vector<double>& budgets() const { return budgets_; }
  const std::vector<double>& thresholds() const { return thresholds_; }

  // True when this model's schedule starts with the first r given rounds.
  bool covers(const std::vector<double>& budgets,
              const std::vector<double>& thresholds, double delta2,
              int r) const;

  // Pr[S_r > c_r | S_ℓ ≤ c_ℓ for all ℓ < r], 1 ≤ r ≤ rounds().
  double crossing_probability(int r) const;

  // Pr[S_ℓ ≤ c_ℓ for all ℓ ≤ r]; r = 0 gives 1.
  double survival(int r) const;

  // S_r for a path conditioned to first cross at round r. The release
  // counter charges r draws for it, one per round of the path.
  double sample_first_crossing(int r, RandomSource& gen) const;

 private:
  double position(int level, int j) const;
  double cell_mass(int level, int j, double from) const;
  double step_sd(int r) const;
  double cut(int r) const { return budgets_[r - 1] * thresholds_[r - 1]; }

  std::vector<double> budgets_;
  std::vector<double> thresholds_;
  double delta2_;
  int n_;
  double h_;
  // masses_[ℓ]: normalized surviving density of S_ℓ, ℓ = 0..rounds()−1.
  std::vector<Eigen::VectorXd> masses_;
  std::vector<int> boundary_;          // partial node per level, −1 if none
  std::vector<double> boundary_pos_;   // centre of that partial node
  std::vector<int> top_;               // first node above the cut, per level
  std::vector<double> log_survival_;
  std::vector<double> crossing_;
  // crossing_cdf_[r]: cumulative weights for S_{r−1} given a crossing at r.
  std::vector<Eigen::VectorXd> crossing_cdf_;
};

double crossing_probability(int r, const std::vector<double>& budgets,
                            const std::vector<double>& thresholds,
                            double delta2);

struct EffHistState {
  int round = 0;
  std::map<Eigen::Index, double> tracked;  // index → scaled noise sum ρZ
  std::vector<double> budgets;
  std::vector<double> thresholds;
  double delta2 = 0.0;
  std::int64_t gaussian_draws = 0;
  std::int64_t activations = 0;  // zero counts that joined the tracked set
  std::shared_ptr<const CrossingModel> model;  // reused when it covers the run
};

Eigen::SparseVector<double> efficient_release(const Histogram& hist,
                                              EffHistState& state, double rho,
                                              double tau, double delta2,
                                              RandomSource& gen);

using ThresholdNoise = std::variant<GaussianSpec, LaplaceSpec>;

// One round of dense noise plus thresholding, simulated in O(k + q).
Eigen::SparseVector<double> static_threshold_simulate(const Histogram& hist,
                                                      double tau,
                                                      const ThresholdNoise& noise,
                                                      RandomSource& gen);

// q distinct indices of [0, d) outside `taken` (sorted), uniformly at random.
std::vector<Eigen::Index> sample_untaken(Eigen::Index d,
                                         const std::vector<Eigen::Index>& taken,
                                         std::int64_t q, RandomSource& gen);

}  // namespace lossless

#endif  // LOSSLESS_SPARSE_HIST_HPP_

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

// The release ledger: every release handed out for one query, kept so that
// a new request can be sampled conditionally on its nearest neighbours.

#ifndef LOSSLESS_RELEASE_ENGINE_HPP_
#define LOSSLESS_RELEASE_ENGINE_HPP_

#include <map>
#include <optional>
#include <string>
#include <string_view>

#include <Eigen/Core>

#include "lossless/noise_core.hpp"
#include "lossless/random.hpp"

namespace lossless {

enum class Mechanism { kGaussian, kLaplace, kPoisson, kExponential };

std::string_view mechanism_name(Mechanism mechanism);
Mechanism parse_mechanism(std::string_view name);

// A noise family in the convolution preorder, with its ρ parameterization.
// Larger ρ always means less noise.
struct NoiseFamily {
  Mechanism tag = Mechanism::kGaussian;
  double sensitivity = 1.0;

  // Gaussian variance, Laplace scale, Poisson rate or Exponential rate.
  double native_scale(double rho) const;
  // One fresh noise draw at privacy level rho.
  double sample_base(double rho, RandomSource& gen) const;
  // Noise that degrades a release at rho_high into one at rho_low < rho_high.
  double sample_bridge(double rho_high, double rho_low, RandomSource& gen) const;
  // The piece from rho_right down to rho, given that it and the piece from
  // rho down to rho_left sum to gap = Y_left - Y_right.
  double sample_conditional(double rho_left, double rho, double rho_right,
                            double gap, RandomSource& gen) const;
};

struct Neighbor {
  double rho = 0.0;
  // nullptr for the ρ = 0 sentinel, or for ρ = ∞ when the secret is absent.
  const Eigen::VectorXd* value = nullptr;
};

struct NeighborPair {
  Neighbor left;
  Neighbor right;
  bool exact = false;  // rho is already recorded; left holds it
};

class Ledger {
 public:
  // rho_inf = ∞ keeps the exact query value (Gaussian only). A finite rho_inf
  // stores one release at rho_inf and forgets the query value.
  static Ledger create(const Eigen::VectorXd& query_value, double sensitivity,
                       Mechanism mechanism, double rho_inf, RandomSource& gen);

  // Rebuilds a ledger from stored parts; used by the document loader.
  static Ledger restore(Mechanism mechanism, double sensitivity, double rho_inf,
                        Eigen::Index dimension,
                        std::map<double, Eigen::VectorXd> entries,
                        std::optional<Eigen::VectorXd> secret);

  Mechanism mechanism() const { return family_.tag; }
  const NoiseFamily& family() const { return family_; }
  double sensitivity() const { return family_.sensitivity; }
  double rho_inf() const { return rho_inf_; }
  bool bounded() const { return std::isfinite(rho_inf_); }
  Eigen::Index dimension() const { return dimension_; }

  // Releases keyed by ρ; a bounded ledger includes its ρ∞ entry.
  const std::map<double, Eigen::VectorXd>& entries() const { return entries_; }
  const std::optional<Eigen::VectorXd>& secret() const { return secret_; }
  // Unbounded ledger whose exact value was not loaded.
  bool sealed() const { return !bounded() && !secret_.has_value(); }

  NeighborPair neighbors(double rho) const;

  // Returns the stored release at rho, creating it if needed.
  const Eigen::VectorXd& release(double rho, RandomSource& gen);

 private:
  Ledger() = default;
  void check_request(double rho) const;

  NoiseFamily family_;
  double rho_inf_ = kInfinity;
  Eigen::Index dimension_ = 0;
  std::map<double, Eigen::VectorXd> entries_;
  std::optional<Eigen::VectorXd> secret_;
};

}  // namespace lossless

#endif  // LOSSLESS_RELEASE_ENGINE_HPP_

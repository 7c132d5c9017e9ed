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

// Multiple release for factorization mechanisms A = L R: the correlated
// Gaussian noise lives before L, so correlation survives any L.

#ifndef LOSSLESS_FACTORIZATION_HPP_
#define LOSSLESS_FACTORIZATION_HPP_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include <Eigen/Core>
#include <json.hpp>

#include "lossless/release_engine.hpp"

namespace lossless {

struct LeftInverse {
  bool invertible = false;
  Eigen::MatrixXd pinv;  // L⁺ with L⁺L = I; empty when not invertible
};

// Columns of L are independent when every singular value exceeds
// 1e-10 times the largest.
LeftInverse left_inverse_check(const Eigen::MatrixXd& L);

struct FactorizedQuery {
  Eigen::MatrixXd L;  // n × d
  Eigen::MatrixXd R;  // d × m
  double sensitivity = 1.0;  // ℓ2 sensitivity of x ↦ Rx
  bool left_invertible = false;

  static FactorizedQuery make(Eigen::MatrixXd L, Eigen::MatrixXd R,
                              double sensitivity);
  Eigen::MatrixXd workload() const { return L * R; }
};

class FactLedger {
 public:
  // rho_inf = ∞: the inner ledger holds pure noise and Ax is kept.
  // Finite rho_inf: the inner ledger holds releases of Rx and nothing exact.
  static FactLedger create(const FactorizedQuery& query, const Eigen::VectorXd& x,
                           double rho_inf, RandomSource& gen);
  static FactLedger restore(Ledger inner,
                            std::optional<Eigen::VectorXd> exact_product);

  const Ledger& inner() const { return inner_; }
  Ledger& inner() { return inner_; }
  const std::optional<Eigen::VectorXd>& exact_product() const {
    return exact_product_;
  }
  bool bounded() const { return inner_.bounded(); }

 private:
  FactLedger(Ledger inner, std::optional<Eigen::VectorXd> exact)
      : inner_(std::move(inner)), exact_product_(std::move(exact)) {}

  Ledger inner_;
  std::optional<Eigen::VectorXd> exact_product_;
};

// Y_ρ = Ax + L Z_ρ (unbounded) or L Y'_ρ (bounded), length n.
Eigen::VectorXd fact_release(FactLedger& ledger, const FactorizedQuery& query,
                             double rho, RandomSource& gen);

// Ledger document extended with L and R; exact_product only when trusted.
nlohmann::json fact_ledger_to_json(const FactLedger& ledger,
                                   const FactorizedQuery& query,
                                   bool trusted_store);

struct LoadedFactLedger {
  FactorizedQuery query;
  FactLedger ledger;
};

LoadedFactLedger fact_ledger_from_json(const nlohmann::json& doc);

Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path);
Eigen::MatrixXd parse_matrix_csv(std::string_view text);
std::string format_matrix_csv(const Eigen::MatrixXd& m);

// Lower-triangular all-ones n × n matrix.
Eigen::MatrixXd prefix_sum_matrix(Eigen::Index n);

}  // namespace lossless

#endif  // LOSSLESS_FACTORIZATION_HPP_

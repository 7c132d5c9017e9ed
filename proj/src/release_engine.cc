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

#include "lossless/release_engine.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <string>
#include <utility>

#include "lossless/errors.hpp"

namespace lossless {
namespace {

void check_values(const Eigen::VectorXd& v, const char* what) {
  if (!v.allFinite()) throw DomainError(std::string(what) + " must be finite");
}

}  // namespace

std::string_view mechanism_name(Mechanism mechanism) {
  switch (mechanism) {
    case Mechanism::kGaussian: return "gaussian";
    case Mechanism::kLaplace: return "laplace";
    case Mechanism::kPoisson: return "poisson";
    case Mechanism::kExponential: return "exponential";
  }
  return "unknown";
}

Mechanism parse_mechanism(std::string_view name) {
  if (name == "gaussian") return Mechanism::kGaussian;
  if (name == "laplace") return Mechanism::kLaplace;
  if (name == "poisson") return Mechanism::kPoisson;
  if (name == "exponential") return Mechanism::kExponential;
  throw DomainError("unknown mechanism '" + std::string(name) + "'");
}

double NoiseFamily::native_scale(double rho) const {
  if (!(rho > 0.0) || !std::isfinite(rho)) {
    throw DomainError("rho must be finite and positive");
  }
  switch (tag) {
    case Mechanism::kGaussian: return sensitivity * sensitivity / (2.0 * rho);
    case Mechanism::kLaplace: return sensitivity / rho;
    case Mechanism::kPoisson: return 1.0 / rho;
    case Mechanism::kExponential: return rho / sensitivity;
  }
  throw DomainError("unknown mechanism");
}

double NoiseFamily::sample_base(double rho, RandomSource& gen) const {
  const double s = native_scale(rho);
  switch (tag) {
    case Mechanism::kGaussian: return sample_gaussian(GaussianSpec{0.0, s}, gen);
    case Mechanism::kLaplace: return sample_laplace(LaplaceSpec{s}, gen);
    case Mechanism::kPoisson:
      return static_cast<double>(sample_poisson(PoissonSpec{s}, gen));
    case Mechanism::kExponential:
      return sample_exponential(ExponentialSpec{s}, gen);
  }
  throw DomainError("unknown mechanism");
}

double NoiseFamily::sample_bridge(double rho_high, double rho_low,
                                  RandomSource& gen) const {
  if (!(rho_low < rho_high)) throw DomainError("bridge requires rho_low < rho_high");
  const double hi = native_scale(rho_high);
  const double lo = native_scale(rho_low);
  switch (tag) {
    case Mechanism::kGaussian:
      return sample_gaussian(
          gaussian_bridge(0.0, rho_low, rho_high, sensitivity), gen);
    case Mechanism::kLaplace: return sample_laplace_bridge(hi, lo, gen);
    case Mechanism::kPoisson:
      return static_cast<double>(sample_poisson_bridge(lo, hi, gen));
    case Mechanism::kExponential: return sample_exponential_bridge(lo, hi, gen);
  }
  throw DomainError("unknown mechanism");
}

double NoiseFamily::sample_conditional(double rho_left, double rho,
                                       double rho_right, double gap,
                                       RandomSource& gen) const {
  if (!(rho_left < rho) || !(rho < rho_right)) {
    throw DomainError("conditional requires rho_left < rho < rho_right");
  }
  const double left = native_scale(rho_left);
  const double mid = native_scale(rho);
  const double right = native_scale(rho_right);
  switch (tag) {
    case Mechanism::kGaussian: {
      const CombineWeights w = gaussian_combine_weights(rho_left, rho, rho_right);
      GaussianSpec spec = gaussian_bridge(rho_left, rho, rho_right, sensitivity);
      spec.mean = w.left * gap;
      return sample_gaussian(spec, gen);
    }
    case Mechanism::kLaplace:
      return sample_laplace_conditional(mid, right, left, gap, gen);
    case Mechanism::kPoisson: {
      const double n = std::round(gap);
      if (std::abs(gap - n) > 1e-6 || n < 0.0) {
        throw NumericalError("poisson neighbours differ by a non-count");
      }
      return static_cast<double>(sample_poisson_conditional(
          mid - right, left - mid, static_cast<std::int64_t>(n), gen));
    }
    case Mechanism::kExponential:
      if (gap < -1e-9 * (1.0 + std::abs(gap))) {
        throw NumericalError("exponential neighbours are out of order");
      }
      return sample_exponential_conditional(left, mid, right,
                                            std::max(gap, 0.0), gen);
  }
  throw DomainError("unknown mechanism");
}

Ledger Ledger::create(const Eigen::VectorXd& query_value, double sensitivity,
                      Mechanism mechanism, double rho_inf, RandomSource& gen) {
  if (!(sensitivity > 0.0) || !std::isfinite(sensitivity)) {
    throw DomainError("sensitivity must be finite and positive");
  }
  if (!(rho_inf > 0.0)) throw DomainError("rho_inf must be positive");
  if (query_value.size() == 0) throw DomainError("query value is empty");
  check_values(query_value, "query value");
  if (std::isinf(rho_inf) && mechanism != Mechanism::kGaussian) {
    throw UnsupportedError(
        "an unbounded ledger is only available for the gaussian mechanism");
  }

  Ledger ledger;
  ledger.family_ = NoiseFamily{mechanism, sensitivity};
  ledger.rho_inf_ = rho_inf;
  ledger.dimension_ = query_value.size();
  if (std::isinf(rho_inf)) {
    ledger.secret_ = query_value;
  } else {
    Eigen::VectorXd y(query_value.size());
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      y[i] = query_value[i] + ledger.family_.sample_base(rho_inf, gen);
    }
    ledger.entries_.emplace(rho_inf, std::move(y));
  }
  return ledger;
}

Ledger Ledger::restore(Mechanism mechanism, double sensitivity, double rho_inf,
                       Eigen::Index dimension,
                       std::map<double, Eigen::VectorXd> entries,
                       std::optional<Eigen::VectorXd> secret) {
  if (!(sensitivity > 0.0) || !std::isfinite(sensitivity)) {
    throw DomainError("sensitivity must be finite and positive");
  }
  if (!(rho_inf > 0.0)) throw DomainError("rho_inf must be positive");
  if (dimension < 1) throw DomainError("dimension must be at least 1");
  const bool bounded = std::isfinite(rho_inf);
  if (!bounded && mechanism != Mechanism::kGaussian) {
    throw UnsupportedError(
        "an unbounded ledger is only available for the gaussian mechanism");
  }
  if (bounded && secret) {
    throw DomainError("a bounded ledger must not hold the exact value");
  }
  if (bounded && !entries.contains(rho_inf)) {
    throw DomainError("a bounded ledger must hold its rho_inf release");
  }
  for (const auto& [rho, value] : entries) {
    if (!(rho > 0.0) || !std::isfinite(rho) || rho > rho_inf) {
      throw DomainError("ledger entry outside (0, rho_inf]");
    }
    if (value.size() != dimension) throw DomainError("ledger entry has wrong length");
    check_values(value, "ledger entry");
  }
  if (secret) {
    if (secret->size() != dimension) throw DomainError("secret has wrong length");
    check_values(*secret, "secret");
  }

  Ledger ledger;
  ledger.family_ = NoiseFamily{mechanism, sensitivity};
  ledger.rho_inf_ = rho_inf;
  ledger.dimension_ = dimension;
  ledger.entries_ = std::move(entries);
  ledger.secret_ = std::move(secret);
  return ledger;
}

void Ledger::check_request(double rho) const {
  if (!(rho > 0.0) || !std::isfinite(rho)) {
    throw DomainError("rho must be finite and positive");
  }
  if (rho > rho_inf_) {
    throw BudgetExceeded("rho " + std::to_string(rho) + " exceeds rho_inf " +
                         std::to_string(rho_inf_));
  }
}

NeighborPair Ledger::neighbors(double rho) const {
  check_request(rho);
  NeighborPair pair;
  auto it = entries_.lower_bound(rho);
  if (it != entries_.end() && it->first == rho) {
    pair.exact = true;
    pair.left = {it->first, &it->second};
    pair.right = pair.left;
    return pair;
  }
  if (it == entries_.end()) {
    pair.right = {kInfinity, secret_ ? &*secret_ : nullptr};
  } else {
    pair.right = {it->first, &it->second};
  }
  if (it != entries_.begin()) {
    const auto prev = std::prev(it);
    pair.left = {prev->first, &prev->second};
  }
  return pair;
}

const Eigen::VectorXd& Ledger::release(double rho, RandomSource& gen) {
  const NeighborPair n = neighbors(rho);
  if (n.exact) return *n.left.value;
  if (n.right.value == nullptr) {
    throw MissingSecret("release needs the exact value, which was not loaded");
  }
  const Eigen::VectorXd& right = *n.right.value;
  const bool has_left = n.left.value != nullptr;
  Eigen::VectorXd y(dimension_);

  if (family_.tag == Mechanism::kGaussian) {
    const CombineWeights w = gaussian_combine_weights(n.left.rho, rho, n.right.rho);
    const GaussianSpec bridge =
        gaussian_bridge(n.left.rho, rho, n.right.rho, family_.sensitivity);
    for (Eigen::Index i = 0; i < dimension_; ++i) {
      double combined = w.right * right[i];
      if (has_left) combined += w.left * (*n.left.value)[i];
      y[i] = combined + sample_gaussian(bridge, gen);
    }
  } else {
    for (Eigen::Index i = 0; i < dimension_; ++i) {
      const double piece =
          has_left ? family_.sample_conditional(n.left.rho, rho, n.right.rho,
                                                (*n.left.value)[i] - right[i], gen)
                   : family_.sample_bridge(n.right.rho, rho, gen);
      y[i] = right[i] + piece;
    }
  }
  return entries_.emplace(rho, std::move(y)).first->second;
}

}  // namespace lossless

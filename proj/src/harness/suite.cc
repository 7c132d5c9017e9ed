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

#include "lossless/harness/suite.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <sstream>
#include <variant>

#include <Eigen/Core>

#include "harness/oracles.hpp"
#include "lossless/factorization.hpp"
#include "lossless/harness/fig2.hpp"
#include "lossless/harness/stat_tests.hpp"
#include "lossless/noise_core.hpp"
#include "lossless/privacy_account.hpp"
#include "lossless/release_engine.hpp"
#include "lossless/sparse_hist.hpp"

namespace lossless::suite {
namespace {

using oracle::fmt;
using oracle::Scale;

// Family-wise significance for each criterion, split evenly over its tests.
constexpr double kFamilyAlpha = 0.01;

// Releases requested in this order against one ledger.
constexpr std::array<double, 3> kOrder = {1.0, 0.1, 5.0};
// Column of each release when sorted by rho.
constexpr std::array<int, 3> kSortedColumn = {1, 0, 2};
constexpr std::array<double, 3> kSorted = {0.1, 1.0, 5.0};

Eigen::VectorXd scalar(double v) {
  Eigen::VectorXd x(1);
  x << v;
  return x;
}

// Checks every variance against Δ²/(2ρ) with Δ = 1.
bool variance_within(const std::array<stats::Moments, 3>& m, double tol,
                     std::string* detail) {
  bool ok = true;
  std::ostringstream out;
  for (std::size_t i = 0; i < kOrder.size(); ++i) {
    const double expected = 1.0 / (2.0 * kOrder[i]);
    const double rel = m[i].variance() / expected - 1.0;
    ok = ok && std::abs(rel) <= tol;
    out << (i ? ", " : "") << "rho=" << kOrder[i] << " rel.err " << fmt(rel, 3);
  }
  *detail = out.str();
  return ok;
}

// Largest |estimate - 1/(2 max)| in standard errors over a 3x3 block.
double max_cov_z(const stats::CovarianceEstimate& est, Eigen::Index offset) {
  double worst = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = i; j < 3; ++j) {
      const double expected = 1.0 / (2.0 * std::max(kSorted[i], kSorted[j]));
      const double z = std::abs(est.cov(offset + i, offset + j) - expected) /
                       est.se(offset + i, offset + j);
      worst = std::max(worst, z);
    }
  }
  return worst;
}

Outcome gaussian_marginals(const Options& o) {
  const Scale s{o.quick};
  const std::int64_t full = 1000000;
  const std::int64_t n = s.pick(full, 10000);
  const double tol = Scale::widen(0.01, full, n);
  RandomSource gen = make_substream(o.seed, 1);
  const Eigen::VectorXd f = scalar(3.0);
  std::array<stats::Moments, 3> m;
  for (std::int64_t t = 0; t < n; ++t) {
    Ledger ledger = Ledger::create(f, 1.0, Mechanism::kGaussian, kInfinity, gen);
    for (std::size_t i = 0; i < kOrder.size(); ++i) {
      m[i].add(ledger.release(kOrder[i], gen)[0] - f[0]);
    }
  }
  std::string detail;
  const bool ok = variance_within(m, tol, &detail);
  return {"1", "gaussian marginal variance", ok,
          detail + "; tol " + fmt(tol, 3) + ", N=" + std::to_string(n)};
}

Outcome gaussian_covariance(const Options& o) {
  const Scale s{o.quick};
  const std::int64_t n = s.pick(100000, 10000);
  RandomSource gen = make_substream(o.seed, 2);
  const Eigen::VectorXd f = scalar(-1.5);
  Eigen::MatrixXd samples(n, 3);
  for (std::int64_t t = 0; t < n; ++t) {
    Ledger ledger = Ledger::create(f, 1.0, Mechanism::kGaussian, kInfinity, gen);
    for (std::size_t i = 0; i < kOrder.size(); ++i) {
      samples(t, kSortedColumn[i]) = ledger.release(kOrder[i], gen)[0] - f[0];
    }
  }
  const double z = max_cov_z(stats::covariance(samples), 0);
  return {"2", "covariance 1/(2 max(rho_i, rho_j))", z <= 4.0,
          "max |dev| " + fmt(z, 3) + " SE (limit 4), N=" + std::to_string(n)};
}

Outcome convolution_preorder(const Options& o) {
  const Scale s{o.quick};
  const std::int64_t n = s.pick(100000, 10000);
  const int pairs = 20;
  const double alpha = kFamilyAlpha / (3 * pairs);
  RandomSource gen = make_substream(o.seed, 3);
  std::uniform_real_distribution<double> log_rho(std::log(0.2), std::log(5.0));

  std::ostringstream detail;
  bool ok = true;
  for (Mechanism tag : {Mechanism::kLaplace, Mechanism::kPoisson,
                        Mechanism::kExponential}) {
    const NoiseFamily family{tag, 1.0};
    double min_p = 1.0;
    for (int p = 0; p < pairs; ++p) {
      double lo = std::exp(log_rho(gen));
      double hi = std::exp(log_rho(gen));
      while (std::max(lo, hi) / std::min(lo, hi) < 1.05) hi = std::exp(log_rho(gen));
      if (lo > hi) std::swap(lo, hi);
      std::vector<double> xs(static_cast<std::size_t>(n));
      for (double& x : xs) x = family.sample_base(hi, gen) + family.sample_bridge(hi, lo, gen);

      stats::TestResult r;
      if (tag == Mechanism::kLaplace) {
        const double b = 1.0 / lo;
        r = stats::ks_one_sample(xs, [b](double x) { return oracle::laplace_cdf(b, x); });
      } else if (tag == Mechanism::kExponential) {
        r = stats::ks_one_sample(xs, [lo](double x) { return oracle::exponential_cdf(lo, x); });
      } else {
        const double lambda = 1.0 / lo;
        const int kmax = static_cast<int>(std::ceil(lambda + 12.0 * std::sqrt(lambda) + 12.0));
        std::vector<double> counts(kmax + 1, 0.0);
        double overflow = 0.0;
        for (double x : xs) {
          const auto k = static_cast<long long>(x);
          if (k <= kmax) counts[k] += 1.0; else overflow += 1.0;
        }
        r = stats::chi_square_gof(counts, oracle::poisson_pmf(lambda, kmax), overflow);
      }
      min_p = std::min(min_p, r.p_value);
    }
    ok = ok && min_p >= alpha;
    detail << mechanism_name(tag) << " min p " << fmt(min_p, 3) << "; ";
  }
  detail << "per-test alpha " << fmt(alpha, 3) << ", 20 pairs each, N=" << n;
  return {"3", "convolution preorder bridges", ok, detail.str()};
}

Outcome laplace_conditional(const Options& o) {
  const Scale s{o.quick};
  const std::int64_t n = s.pick(100000, 10000);
  RandomSource gen = make_substream(o.seed, 4);
  // ρ∞ = 4 is stored first; 0.25 bridges down from it, then 1 and 0.5 are
  // placed between existing releases.
  const std::array<double, 3> order = {0.25, 1.0, 0.5};
  const Eigen::VectorXd f = scalar(2.0);
  std::array<std::vector<double>, 3> xs;
  for (auto& v : xs) v.reserve(static_cast<std::size_t>(n));
  for (std::int64_t t = 0; t < n; ++t) {
    Ledger ledger = Ledger::create(f, 1.0, Mechanism::kLaplace, 4.0, gen);
    for (std::size_t i = 0; i < order.size(); ++i) {
      xs[i].push_back(ledger.release(order[i], gen)[0] - f[0]);
    }
  }
  const double alpha = kFamilyAlpha / 3;
  double min_p = 1.0;
  std::ostringstream detail;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const double b = 1.0 / order[i];
    const auto r = stats::ks_one_sample(xs[i], [b](double x) { return oracle::laplace_cdf(b, x); });
    min_p = std::min(min_p, r.p_value);
    detail << "b=" << b << " p " << fmt(r.p_value, 3) << "; ";
  }

  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  bool in_range = true;
  for (int i = 0; i < 1000; ++i) {
    const double b2 = std::exp(-3.0 + 6.0 * u(gen));
    const double b = b2 * std::exp(0.01 + 3.0 * u(gen));
    const double b1 = b * std::exp(0.01 + 3.0 * u(gen));
    double k = (u(gen) * 20.0 - 10.0) * b1;
    if (k == 0.0) k = b;
    const LaplaceMixtureWeights w = laplace_conditional_weights(b, b2, b1, k);
    worst = std::max(worst, std::abs(w.p0 + w.pk + w.pH - 1.0));
    for (double p : {w.p0, w.pk, w.pH}) in_range = in_range && p >= 0.0 && p <= 1.0;
  }
  const bool ok = min_p >= alpha && worst <= 1e-9 && in_range;
  detail << "alpha " << fmt(alpha, 3) << ", N=" << n << "; weight sum err "
         << fmt(worst, 3) << " (limit 1e-9)";
  return {"4", "laplace conditional release", ok, detail.str()};
}

Outcome poisson_conditional(const Options&) {
  const std::array<double, 4> rates = {0.5, 1.0, 2.0, 5.0};
  double worst = 0.0;
  for (double l1 : rates) {
    for (double l2 : rates) {
      const std::vector<double> p1 = oracle::poisson_pmf(l1, 12);
      const std::vector<double> p2 = oracle::poisson_pmf(l2, 12);
      for (int k = 0; k <= 12; ++k) {
        const std::vector<double> pmf = poisson_conditional_pmf(l1, l2, k);
        double total = 0.0;
        for (int x = 0; x <= k; ++x) total += p1[x] * p2[k - x];
        for (int x = 0; x <= k; ++x) {
          worst = std::max(worst, std::abs(pmf[x] - p1[x] * p2[k - x] / total));
        }
      }
    }
  }
  return {"5", "poisson conditional pmf vs enumeration", worst < 1e-12,
          "max abs err " + fmt(worst, 3) + " (limit 1e-12)"};
}

Outcome sparse_equivalence(const Options& o) {
  const Scale s{o.quick};
  const std::int64_t trials = s.pick(10000, 2000);
  const Histogram hist =
      Histogram::make(100, {{3, 1}, {17, 2}, {42, 3}, {64, 5}, {99, 8}});
  const std::int64_t k = hist.support_size();
  const std::vector<double> budgets = {0.3, 1.0, 3.0};
  const std::vector<double> taus = {3.0, 2.0, 1.5};
  const int m = 3;
  auto model = std::make_shared<const CrossingModel>(budgets, taus, 1.0);

  struct Tally {
    std::vector<double> counts[3][2];
    std::vector<double> values[3][2];
  };
  auto make_tally = [&]() {
    Tally t;
    for (int r = 0; r < m; ++r) {
      t.counts[r][0].assign(k + 1, 0.0);
      t.counts[r][1].assign(hist.dimension - k + 1, 0.0);
    }
    return t;
  };
  Tally naive = make_tally();
  Tally eff = make_tally();
  RandomSource gn = make_substream(o.seed, 61);
  RandomSource ge = make_substream(o.seed, 62);
  bool counter_ok = true;
  bool above_ok = true;

  for (std::int64_t t = 0; t < trials; ++t) {
    NaiveHistState ns;
    EffHistState es;
    es.model = model;
    for (int r = 0; r < m; ++r) {
      const Eigen::VectorXd y = naive_release(hist, ns, budgets[r], taus[r], 1.0, gn);
      int released[2] = {0, 0};
      for (Eigen::Index i = 0; i < y.size(); ++i) {
        if (y[i] == 0.0) continue;
        const int cls = hist.counts.contains(i) ? 0 : 1;
        ++released[cls];
        naive.values[r][cls].push_back(y[i]);
      }
      for (int c = 0; c < 2; ++c) naive.counts[r][c][released[c]] += 1.0;

      const Eigen::SparseVector<double> z =
          efficient_release(hist, es, budgets[r], taus[r], 1.0, ge);
      int eff_released[2] = {0, 0};
      for (Eigen::SparseVector<double>::InnerIterator it(z); it; ++it) {
        const int cls = hist.counts.contains(it.index()) ? 0 : 1;
        ++eff_released[cls];
        eff.values[r][cls].push_back(it.value());
        above_ok = above_ok && it.value() > taus[r];
      }
      for (int c = 0; c < 2; ++c) eff.counts[r][c][eff_released[c]] += 1.0;
    }
    counter_ok = counter_ok && es.gaussian_draws == (k + es.activations) * m;
  }

  const double alpha = kFamilyAlpha / (m * 2 * 2);
  double min_p = 1.0;
  std::string where;
  for (int r = 0; r < m; ++r) {
    for (int c = 0; c < 2; ++c) {
      const auto freq = stats::chi_square_homogeneity(naive.counts[r][c], eff.counts[r][c]);
      if (freq.p_value < min_p) {
        min_p = freq.p_value;
        where = "frequency r=" + std::to_string(r + 1) + (c ? " zero" : " nonzero");
      }
      const auto& a = naive.values[r][c];
      const auto& b = eff.values[r][c];
      if (a.empty() != b.empty()) {
        min_p = 0.0;
        where = "values missing on one side";
      } else if (!a.empty()) {
        const auto ks = stats::ks_two_sample(a, b);
        if (ks.p_value < min_p) {
          min_p = ks.p_value;
          where = "values r=" + std::to_string(r + 1) + (c ? " zero" : " nonzero");
        }
      }
    }
  }
  const bool ok = min_p >= alpha && counter_ok && above_ok;
  return {"6", "sparse histogram efficient vs naive", ok,
          "min p " + fmt(min_p, 3) + " (" + where + "), alpha " + fmt(alpha, 3) +
              "; draw count (k+c)m " + (counter_ok ? "exact" : "MISMATCH") +
              "; activated above threshold " + (above_ok ? "yes" : "NO") +
              ", trials=" + std::to_string(trials)};
}

Outcome fig2_reproduction(const Options& o) {
  const Scale s{o.quick};
  const std::int64_t full = 1000000;
  const std::int64_t reps = s.pick(full, 10000);
  const double tol = Scale::widen(0.01, full, reps);

  fig2::ExperimentConfig sparse;
  sparse.rho_grid = fig2::log_grid(0.001, 5.0, 20);
  sparse.repetitions = reps;
  sparse.seed = o.seed + 7;
  const std::vector<fig2::Row> rows = fig2::run_fig2(sparse);

  fig2::ExperimentConfig dense = sparse;
  dense.rho_grid = fig2::log_grid(0.001, 5.0, 39);
  dense.seed = o.seed + 8;
  dense.modes = {fig2::Mode::kIndependent};
  const std::vector<fig2::Row> dense_rows = fig2::run_fig2(dense);

  std::vector<double> loss;
  std::vector<double> ind;
  double worst_rel = 0.0;
  for (const fig2::Row& r : rows) {
    if (r.mode == fig2::Mode::kLossless) {
      loss.push_back(r.empirical_variance);
      worst_rel = std::max(worst_rel,
                           std::abs(r.empirical_variance / (1.0 / (2.0 * r.rho)) - 1.0));
    } else {
      ind.push_back(r.empirical_variance);
    }
  }
  bool larger = true;
  bool denser = true;
  double min_ratio = kInfinity;
  double min_dense_ratio = kInfinity;
  for (std::size_t j = 1; j < loss.size(); ++j) {
    larger = larger && ind[j] > loss[j];
    min_ratio = std::min(min_ratio, ind[j] / loss[j]);
    const double d = dense_rows[2 * j].empirical_variance;
    denser = denser && d > ind[j];
    min_dense_ratio = std::min(min_dense_ratio, d / ind[j]);
  }
  const bool ok = worst_rel <= tol && larger && denser;
  return {"7", "fig2 variance: lossless flat, independent larger", ok,
          "lossless max rel.err " + fmt(worst_rel, 3) + " (tol " + fmt(tol, 3) +
              "); min independent/lossless " + fmt(min_ratio, 4) +
              "; min 39-pt/20-pt independent " + fmt(min_dense_ratio, 4) +
              ", reps=" + std::to_string(reps)};
}

Outcome factorization_stream(const Options& o) {
  const Scale s{o.quick};
  const std::int64_t full = 1000000;
  const std::int64_t n = s.pick(full, 10000);
  const std::int64_t n_cov = s.pick(100000, 10000);
  const double tol = Scale::widen(0.01, full, n);
  const Eigen::Index dim = 8;
  const FactorizedQuery query = FactorizedQuery::make(
      prefix_sum_matrix(dim), Eigen::MatrixXd::Identity(dim, dim), 1.0);
  const LeftInverse inv = left_inverse_check(query.L);
  if (!inv.invertible) return {"8", "factorization stream", false, "L not invertible"};
  const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(dim, 1.0, 8.0);
  const Eigen::VectorXd rx = query.R * x;

  RandomSource gen = make_substream(o.seed, 8);
  std::vector<std::array<stats::Moments, 3>> m(dim);
  Eigen::MatrixXd samples(n_cov, 3 * dim);
  for (std::int64_t t = 0; t < n; ++t) {
    FactLedger ledger = FactLedger::create(query, x, kInfinity, gen);
    for (std::size_t i = 0; i < kOrder.size(); ++i) {
      const Eigen::VectorXd z = inv.pinv * fact_release(ledger, query, kOrder[i], gen) - rx;
      for (Eigen::Index c = 0; c < dim; ++c) {
        m[c][i].add(z[c]);
        if (t < n_cov) samples(t, 3 * c + kSortedColumn[i]) = z[c];
      }
    }
  }
  double worst_rel = 0.0;
  for (Eigen::Index c = 0; c < dim; ++c) {
    for (std::size_t i = 0; i < kOrder.size(); ++i) {
      worst_rel = std::max(worst_rel,
                           std::abs(m[c][i].variance() * 2.0 * kOrder[i] - 1.0));
    }
  }
  const stats::CovarianceEstimate est = stats::covariance(samples);
  double worst_z = 0.0;
  for (Eigen::Index c = 0; c < dim; ++c) worst_z = std::max(worst_z, max_cov_z(est, 3 * c));
  const bool ok = worst_rel <= tol && worst_z <= 4.0;
  return {"8", "factorization: L^-1 releases follow criteria 1-2", ok,
          "max var rel.err " + fmt(worst_rel, 3) + " (tol " + fmt(tol, 3) +
              "), max cov dev " + fmt(worst_z, 3) + " SE (limit 4), N=" +
              std::to_string(n) + "/" + std::to_string(n_cov)};
}

Outcome poisson_accountant(const Options&) {
  const double lambda = 1000.0;
  const double delta = 1e-6;
  // Term-by-term recomputation of the unit-sensitivity bound.
  const double t1 = std::sqrt(2.0 * std::log(1.25e6)) / std::sqrt(lambda);
  const double t2 = 2.0 * std::log(2.0e7) * std::log(1.0e7) / lambda;
  const PoissonBound got = poisson_epsilon_unit(lambda, delta, 1);
  const auto* params = std::get_if<ApproxDpParams>(&got);
  const double eps = params ? params->epsilon : std::nan("");
  const bool value_ok = params && std::abs(eps - (t1 + t2)) <= 1e-3 &&
                        std::abs(eps - 0.709) <= 1e-3;

  const double bound = 23.0 * std::log(1.0e7);
  const bool reject_below =
      std::holds_alternative<PreconditionFailure>(poisson_epsilon_unit(bound * 0.999, delta, 1)) &&
      std::holds_alternative<PreconditionFailure>(
          poisson_epsilon(bound * 0.999, delta, 1, 1.0, 1.0, 1.0));
  const bool accept_above =
      std::holds_alternative<ApproxDpParams>(poisson_epsilon_unit(bound * 1.001, delta, 1)) &&
      std::holds_alternative<ApproxDpParams>(
          poisson_epsilon(bound * 1.001, delta, 1, 1.0, 1.0, 1.0));
  return {"9", "poisson accountant", value_ok && reject_below && accept_above,
          "eps " + fmt(eps, 6) + " vs terms " + fmt(t1, 5) + " + " + fmt(t2, 5) +
              " (tol 1e-3); precondition at 23 ln(10d/delta) = " + fmt(bound, 5) +
              (reject_below && accept_above ? " enforced" : " NOT enforced")};
}

Outcome crossing_oracle(const Options& o) {
  const Scale s{o.quick};
  const std::int64_t n = s.pick(10000000, 100000);
  struct Schedule {
    std::vector<double> budgets;
    std::vector<double> taus;
  };
  const std::array<Schedule, 2> schedules = {
      Schedule{{0.3, 1.0, 3.0}, {3.0, 2.0, 1.5}},
      Schedule{{0.5, 1.0, 2.0}, {1.0, 0.5, 0.25}}};
  RandomSource gen = make_substream(o.seed, 10);
  std::normal_distribution<double> normal;
  double worst = 0.0;
  std::ostringstream detail;
  for (const Schedule& sc : schedules) {
    const CrossingModel model(sc.budgets, sc.taus, 1.0);
    std::array<std::int64_t, 3> alive{};
    std::array<std::int64_t, 3> cross{};
    std::array<double, 3> sd{};
    for (int r = 0; r < 3; ++r) {
      sd[r] = std::sqrt(0.5 * (sc.budgets[r] - (r ? sc.budgets[r - 1] : 0.0)));
    }
    for (std::int64_t t = 0; t < n; ++t) {
      double sum = 0.0;
      for (int r = 0; r < 3; ++r) {
        sum += sd[r] * normal(gen);
        ++alive[r];
        if (sum > sc.budgets[r] * sc.taus[r]) {
          ++cross[r];
          break;
        }
      }
    }
    for (int r = 0; r < 3; ++r) {
      const double p = model.crossing_probability(r + 1);
      const double est = static_cast<double>(cross[r]) / static_cast<double>(alive[r]);
      const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(alive[r]));
      const double z = std::abs(est - p) / se;
      worst = std::max(worst, z);
      detail << "p" << r + 1 << "=" << fmt(p, 4) << " mc " << fmt(est, 4) << "; ";
    }
  }
  detail << "max dev " << fmt(worst, 3) << " SE (limit 3), N=" << n;
  return {"10", "crossing probability vs Monte Carlo", worst <= 3.0, detail.str()};
}

}  // namespace

std::vector<Outcome> run_acceptance(const Options& options) {
  using Check = Outcome (*)(const Options&);
  const std::array<Check, 10> checks = {
      gaussian_marginals, gaussian_covariance, convolution_preorder,
      laplace_conditional, poisson_conditional, sparse_equivalence,
      fig2_reproduction, factorization_stream, poisson_accountant,
      crossing_oracle};
  std::vector<Outcome> out;
  for (Check check : checks) {
    try {
      out.push_back(check(options));
    } catch (const std::exception& e) {
      out.push_back({std::to_string(out.size() + 1), "criterion raised", false, e.what()});
    }
  }
  return out;
}

std::string format_line(const Outcome& outcome) {
  return std::string(outcome.pass ? "PASS" : "FAIL") + "  [" + outcome.id + "] " +
         outcome.title + " | " + outcome.detail;
}

}  // namespace lossless::suite

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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <variant>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <Eigen/Core>

#include "harness/oracles.hpp"
#include "lossless/factorization.hpp"
#include "lossless/harness/fig2.hpp"
#include "lossless/harness/stat_tests.hpp"
#include "lossless/harness/suite.hpp"
#include "lossless/noise_core.hpp"
#include "lossless/privacy_account.hpp"
#include "lossless/release_engine.hpp"
#include "lossless/sparse_hist.hpp"

namespace lossless::suite {
namespace {

using oracle::fmt;
using oracle::Scale;

constexpr double kFamilyAlpha = 0.01;

double log_uniform(RandomSource& gen, double lo, double hi) {
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  return std::exp(u(gen));
}

// Five distinct budgets in a random request order.
std::vector<double> random_budgets(RandomSource& gen) {
  std::vector<double> rhos;
  while (rhos.size() < 5) {
    const double r = log_uniform(gen, 0.2, 5.0);
    bool close = false;
    for (double q : rhos) close = close || std::abs(std::log(r / q)) < 0.05;
    if (!close) rhos.push_back(r);
  }
  return rhos;
}

Outcome truncated_bounds(const Options& o) {
  RandomSource gen = make_substream(o.seed, 101);
  std::uniform_real_distribution<double> u(-12.0, 12.0);
  const int draws = Scale{o.quick}.pick(200000, 20000);
  int bad = 0;
  for (int i = 0; i < draws; ++i) {
    const double mean = u(gen);
    const double var = std::exp(u(gen) / 4.0);
    double lo = u(gen);
    double hi = u(gen);
    if (lo > hi) std::swap(lo, hi);
    if (i % 4 == 1) lo = -kInfinity;
    if (i % 4 == 2) hi = kInfinity;
    const double sd = std::sqrt(var);
    // Skip intervals with no representable mass.
    const double a = (lo - mean) / sd;
    const double b = (hi - mean) / sd;
    if (a > 35.0 || b < -35.0 || hi - lo < 1e-9) continue;
    const double x = sample_truncated_gaussian(GaussianSpec{mean, var}, lo, hi, gen);
    if (!(x > lo && x <= hi)) ++bad;
  }
  return {"I1", "truncated gaussian stays in (lower, upper]", bad == 0,
          std::to_string(bad) + " violations in " + std::to_string(draws)};
}

Outcome conv_density_mass(const Options& o) {
  RandomSource gen = make_substream(o.seed, 102);
  boost::math::quadrature::exp_sinh<double> integrator;
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double b1 = log_uniform(gen, 0.05, 20.0);
    double b2 = log_uniform(gen, 0.05, 20.0);
    if (std::abs(b1 - b2) < 1e-3 * b1) b2 = 2.0 * b1;
    const double half =
        integrator.integrate([&](double t) { return laplace_conv_density(b1, b2, t); });
    worst = std::max(worst, std::abs(2.0 * half - 1.0));
  }
  return {"I2", "laplace convolution density integrates to 1", worst <= 1e-6,
          "max |mass - 1| " + fmt(worst, 3) + " over 50 random pairs (limit 1e-6)"};
}

Outcome poisson_pmf_random(const Options& o) {
  RandomSource gen = make_substream(o.seed, 103);
  std::uniform_real_distribution<double> u(0.01, 5.0);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double l1 = u(gen);
    const double l2 = u(gen);
    const auto p1 = oracle::poisson_pmf(l1, 12);
    const auto p2 = oracle::poisson_pmf(l2, 12);
    for (int k = 0; k <= 12; ++k) {
      const auto pmf = poisson_conditional_pmf(l1, l2, k);
      double total = 0.0;
      for (int x = 0; x <= k; ++x) total += p1[x] * p2[k - x];
      for (int x = 0; x <= k; ++x) {
        worst = std::max(worst, std::abs(pmf[x] - p1[x] * p2[k - x] / total));
      }
    }
  }
  return {"I3", "poisson conditional pmf, random rates <= 5", worst < 1e-12,
          "max abs err " + fmt(worst, 3) + " (limit 1e-12)"};
}

// Marginal of each release equals a fresh single release.
Outcome marginals_all(const Options& o) {
  const std::int64_t n = Scale{o.quick}.pick(100000, 10000);
  const double alpha = kFamilyAlpha / 20;
  RandomSource gen = make_substream(o.seed, 104);
  double min_p = 1.0;
  std::string where;
  for (Mechanism tag : {Mechanism::kGaussian, Mechanism::kLaplace,
                        Mechanism::kPoisson, Mechanism::kExponential}) {
    const std::vector<double> rhos = random_budgets(gen);
    const double top = *std::max_element(rhos.begin(), rhos.end());
    const double rho_inf = tag == Mechanism::kGaussian ? kInfinity : 1.5 * top;
    const double f = tag == Mechanism::kPoisson ? 7.0 : 0.5;
    const double sens = tag == Mechanism::kPoisson ? 1.0 : 2.0;
    Eigen::VectorXd q(1);
    q << f;
    std::vector<std::vector<double>> xs(5);
    for (std::int64_t t = 0; t < n; ++t) {
      Ledger ledger = Ledger::create(q, sens, tag, rho_inf, gen);
      for (int i = 0; i < 5; ++i) xs[i].push_back(ledger.release(rhos[i], gen)[0] - f);
    }
    for (int i = 0; i < 5; ++i) {
      const double rho = rhos[i];
      stats::TestResult r;
      switch (tag) {
        case Mechanism::kGaussian: {
          const double sd = sens / std::sqrt(2.0 * rho);
          r = stats::ks_one_sample(xs[i], [sd](double x) { return oracle::normal_cdf(x / sd); });
          break;
        }
        case Mechanism::kLaplace: {
          const double b = sens / rho;
          r = stats::ks_one_sample(xs[i], [b](double x) { return oracle::laplace_cdf(b, x); });
          break;
        }
        case Mechanism::kExponential: {
          const double rate = rho / sens;
          r = stats::ks_one_sample(xs[i], [rate](double x) { return oracle::exponential_cdf(rate, x); });
          break;
        }
        case Mechanism::kPoisson: {
          const double lambda = 1.0 / rho;
          const int kmax = static_cast<int>(std::ceil(lambda + 12.0 * std::sqrt(lambda) + 12.0));
          std::vector<double> counts(kmax + 1, 0.0);
          double overflow = 0.0;
          for (double x : xs[i]) {
            const auto k = static_cast<long long>(std::llround(x));
            if (k >= 0 && k <= kmax) counts[k] += 1.0; else overflow += 1.0;
          }
          r = stats::chi_square_gof(counts, oracle::poisson_pmf(lambda, kmax), overflow);
          break;
        }
      }
      if (r.p_value < min_p) {
        min_p = r.p_value;
        where = std::string(mechanism_name(tag)) + " rho=" + fmt(rho, 4);
      }
    }
  }
  return {"I4", "release marginals match fresh releases (4 families x 5 rho)",
          min_p >= alpha,
          "min p " + fmt(min_p, 3) + " (" + where + "), alpha " + fmt(alpha, 3) +
              ", N=" + std::to_string(n)};
}

Outcome post_processing(const Options& o) {
  const std::int64_t n = Scale{o.quick}.pick(100000, 10000);
  RandomSource gen = make_substream(o.seed, 105);
  const double lo = 0.3;
  const double hi = 2.5;
  std::vector<double> diff;
  diff.reserve(static_cast<std::size_t>(n));
  const Eigen::VectorXd f = Eigen::VectorXd::Constant(1, 4.0);
  for (std::int64_t t = 0; t < n; ++t) {
    Ledger ledger = Ledger::create(f, 1.0, Mechanism::kGaussian, kInfinity, gen);
    const double a = ledger.release(hi, gen)[0];
    const double b = ledger.release(lo, gen)[0];
    diff.push_back(b - a);
  }
  const double sd = std::sqrt((1.0 / lo - 1.0 / hi) / 2.0);
  const auto r = stats::ks_one_sample(diff, [sd](double x) { return oracle::normal_cdf(x / sd); });
  return {"I5", "Y_rho - Y_rho' is independent gaussian noise", r.p_value >= kFamilyAlpha,
          "KS p " + fmt(r.p_value, 3) + ", N=" + std::to_string(n)};
}

Outcome order_invariance(const Options& o) {
  const std::int64_t n = Scale{o.quick}.pick(100000, 10000);
  RandomSource gen = make_substream(o.seed, 106);
  const std::vector<double> rhos = {0.2, 0.7, 1.3, 4.0};
  const std::vector<std::vector<int>> orders = {{0, 1, 2, 3}, {2, 0, 3, 1}};
  std::vector<stats::CovarianceEstimate> est;
  const Eigen::VectorXd f = Eigen::VectorXd::Zero(1);
  for (const auto& order : orders) {
    Eigen::MatrixXd samples(n, 4);
    for (std::int64_t t = 0; t < n; ++t) {
      Ledger ledger = Ledger::create(f, 1.0, Mechanism::kGaussian, kInfinity, gen);
      for (int i : order) samples(t, i) = ledger.release(rhos[i], gen)[0];
    }
    est.push_back(stats::covariance(samples));
  }
  const Eigen::ArrayXXd z = (est[0].cov - est[1].cov).array().abs() /
                            (est[0].se.array().square() + est[1].se.array().square()).sqrt();
  const double worst = z.maxCoeff();
  return {"I6", "request order does not change the joint covariance", worst <= 4.0,
          "max |diff| " + fmt(worst, 3) + " SE (limit 4), N=" + std::to_string(n)};
}

Outcome ledger_monotone(const Options& o) {
  RandomSource gen = make_substream(o.seed, 107);
  bool ok = true;
  for (Mechanism tag : {Mechanism::kGaussian, Mechanism::kLaplace,
                        Mechanism::kPoisson, Mechanism::kExponential}) {
    const double rho_inf = tag == Mechanism::kGaussian ? kInfinity : 10.0;
    Ledger ledger = Ledger::create(Eigen::VectorXd::Constant(3, 2.0), 1.0, tag, rho_inf, gen);
    std::uniform_int_distribution<int> pick(0, 7);
    const std::array<double, 8> pool = {0.1, 0.3, 0.5, 1.0, 2.0, 3.0, 7.0, 10.0};
    for (int step = 0; step < 40; ++step) {
      const double rho = pool[pick(gen)];
      const std::size_t before = ledger.entries().size();
      const bool novel = !ledger.entries().contains(rho);
      const Eigen::VectorXd first = ledger.release(rho, gen);
      const std::size_t after = ledger.entries().size();
      ok = ok && after == before + (novel ? 1 : 0);
      ok = ok && (ledger.release(rho, gen).array() == first.array()).all();
    }
  }
  return {"I7", "ledger grows by one per novel rho, repeats are stored", ok,
          ok ? "40 random requests per family" : "entry count or stored value changed"};
}

Outcome poisson_ordering(const Options& o) {
  RandomSource gen = make_substream(o.seed, 108);
  const int trials = Scale{o.quick}.pick(20000, 2000);
  int bad = 0;
  for (int t = 0; t < trials; ++t) {
    const std::vector<double> rhos = random_budgets(gen);
    Ledger ledger = Ledger::create(Eigen::VectorXd::Constant(2, 5.0), 1.0,
                                   Mechanism::kPoisson, 6.0, gen);
    for (double r : rhos) ledger.release(r, gen);
    const Eigen::VectorXd* prev = nullptr;
    for (const auto& [rho, value] : ledger.entries()) {
      if (prev && ((*prev).array() < value.array()).any()) ++bad;
      prev = &value;
    }
  }
  return {"I8", "poisson releases decrease as rho grows", bad == 0,
          std::to_string(bad) + " ordering violations in " + std::to_string(trials) + " ledgers"};
}

Outcome factorization_marginal(const Options& o) {
  const std::int64_t n = Scale{o.quick}.pick(100000, 10000);
  RandomSource gen = make_substream(o.seed, 109);
  const Eigen::Index dim = 8;
  const FactorizedQuery query = FactorizedQuery::make(
      prefix_sum_matrix(dim), Eigen::MatrixXd::Identity(dim, dim), 1.0);
  const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(dim, 0.0, 7.0);
  const Eigen::VectorXd ax = query.workload() * x;
  const Eigen::VectorXd lvar = (query.L * query.L.transpose()).diagonal();
  const std::array<double, 2> rhos = {2.0, 0.4};
  std::vector<std::vector<double>> xs(2 * dim);
  for (std::int64_t t = 0; t < n; ++t) {
    FactLedger ledger = FactLedger::create(query, x, kInfinity, gen);
    for (int i = 0; i < 2; ++i) {
      const Eigen::VectorXd y = fact_release(ledger, query, rhos[i], gen);
      for (Eigen::Index c = 0; c < dim; ++c) xs[i * dim + c].push_back(y[c]);
    }
  }
  const double alpha = kFamilyAlpha / static_cast<double>(2 * dim);
  double min_p = 1.0;
  for (int i = 0; i < 2; ++i) {
    for (Eigen::Index c = 0; c < dim; ++c) {
      const double mu = ax[c];
      const double sd = std::sqrt(lvar[c] / (2.0 * rhos[i]));
      const auto r = stats::ks_one_sample(
          xs[i * dim + c], [mu, sd](double v) { return oracle::normal_cdf((v - mu) / sd); });
      min_p = std::min(min_p, r.p_value);
    }
  }
  return {"I9", "factorization marginals N((Ax)_i, (LL^T)_ii/(2 rho))", min_p >= alpha,
          "min p " + fmt(min_p, 3) + ", alpha " + fmt(alpha, 3) + ", N=" + std::to_string(n)};
}

Outcome naive_variance(const Options& o) {
  const Scale s{o.quick};
  const std::int64_t full = 100000;
  const std::int64_t n = s.pick(full, 10000);
  const double tol = Scale::widen(0.01, full, n);
  RandomSource gen = make_substream(o.seed, 110);
  const Histogram hist = Histogram::make(4, {{1, 3}});
  const std::array<double, 3> rhos = {0.5, 2.0, 3.5};
  std::array<stats::Moments, 3> m;
  for (std::int64_t t = 0; t < n; ++t) {
    NaiveHistState state;
    for (int r = 0; r < 3; ++r) {
      const Eigen::VectorXd y = naive_release(hist, state, rhos[r], -kInfinity, 1.0, gen);
      m[r].add(y[2]);
    }
  }
  double worst = 0.0;
  for (int r = 0; r < 3; ++r) {
    worst = std::max(worst, std::abs(m[r].variance() * 2.0 * rhos[r] - 1.0));
  }
  return {"I10", "naive histogram noise variance 1/(2 rho_r)", worst <= tol,
          "max rel.err " + fmt(worst, 3) + " (tol " + fmt(tol, 3) + "), N=" + std::to_string(n)};
}

Outcome crossing_telescopes(const Options& o) {
  const std::int64_t n = Scale{o.quick}.pick(2000000, 100000);
  const std::vector<double> budgets = {0.4, 0.9, 1.6};
  const std::vector<double> taus = {1.5, 1.2, 1.0};
  const CrossingModel model(budgets, taus, 1.0);
  double none = 1.0;
  for (int r = 1; r <= 3; ++r) none *= 1.0 - model.crossing_probability(r);
  const double any = 1.0 - none;
  const double gap_survival = std::abs(none - model.survival(3));

  RandomSource gen = make_substream(o.seed, 111);
  std::normal_distribution<double> normal;
  std::int64_t hits = 0;
  for (std::int64_t t = 0; t < n; ++t) {
    double sum = 0.0;
    double prev = 0.0;
    for (int r = 0; r < 3; ++r) {
      sum += std::sqrt(0.5 * (budgets[r] - prev)) * normal(gen);
      prev = budgets[r];
      if (sum > budgets[r] * taus[r]) {
        ++hits;
        break;
      }
    }
  }
  const double est = static_cast<double>(hits) / static_cast<double>(n);
  const double z = std::abs(est - any) / std::sqrt(any * (1.0 - any) / static_cast<double>(n));
  return {"I11", "chained crossing probabilities give Pr[any crossing]",
          z <= 3.0 && gap_survival < 1e-9,
          "chain " + fmt(any, 5) + " vs mc " + fmt(est, 5) + " (" + fmt(z, 3) +
              " SE, limit 3); survival gap " + fmt(gap_survival, 3)};
}

Outcome accountant_properties(const Options& o) {
  RandomSource gen = make_substream(o.seed, 112);
  std::uniform_real_distribution<double> u(0.01, 3.0);
  std::uniform_int_distribution<int> dyadic(1, 4096);
  bool comm = true;
  bool assoc = true;
  bool max_le_sum = true;
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<ZcdpBudget> b(1 + trial % 7);
    for (auto& x : b) x.rho = u(gen);
    const double base = zcdp_compose(b).rho;
    std::vector<ZcdpBudget> shuffled = b;
    std::shuffle(shuffled.begin(), shuffled.end(), gen);
    comm = comm && zcdp_compose(shuffled).rho == base;
    max_le_sum = max_le_sum && multiple_release_budget(b).rho <= base;

    const ZcdpBudget a{dyadic(gen) / 1024.0};
    const ZcdpBudget c{dyadic(gen) / 1024.0};
    const ZcdpBudget d{dyadic(gen) / 1024.0};
    const double left = zcdp_compose({zcdp_compose({a, c}), d}).rho;
    const double right = zcdp_compose({a, zcdp_compose({c, d})}).rho;
    assoc = assoc && left == right;
  }
  bool monotone = true;
  for (double delta : {1e-9, 1e-6, 1e-3}) {
    for (std::int64_t d : {1, 10, 1000}) {
      double prev = kInfinity;
      for (double lambda = 2000.0; lambda <= 64000.0; lambda *= 2.0) {
        const auto full = poisson_epsilon(lambda, delta, d, 1.0, 1.0, 1.0);
        const auto more_d = poisson_epsilon(lambda, delta, 2 * d, 1.0, 1.0, 1.0);
        const double e = std::get<ApproxDpParams>(full).epsilon;
        monotone = monotone && e < prev &&
                   std::get<ApproxDpParams>(more_d).epsilon > e;
        prev = e;
      }
    }
  }
  const bool ok = comm && assoc && max_le_sum && monotone;
  std::ostringstream detail;
  detail << "commutative " << comm << ", associative " << assoc << ", max<=sum "
         << max_le_sum << ", poisson eps monotone " << monotone;
  return {"I12", "accountant algebra", ok, detail.str()};
}

Outcome fig2_determinism(const Options& o) {
  fig2::ExperimentConfig config;
  config.rho_grid = fig2::log_grid(0.001, 5.0, 6);
  config.repetitions = 25000;
  config.seed = o.seed;
  const std::string a = fig2::format_csv(fig2::run_fig2(config));
  const std::string b = fig2::format_csv(fig2::run_fig2(config));
  fig2::ExperimentConfig single = config;
  single.rho_grid = {0.7};
  const auto rows = fig2::run_fig2(single);
  const bool coincide = rows.size() == 2 &&
                        rows[0].theoretical_variance == rows[1].theoretical_variance;
  return {"I13", "fig2 output is byte-identical per seed", a == b && coincide,
          std::string(a == b ? "identical" : "DIFFERENT") +
              "; single-point grid modes coincide " + (coincide ? "yes" : "NO")};
}

}  // namespace

std::vector<Outcome> run_invariants(const Options& options) {
  using Check = Outcome (*)(const Options&);
  const std::vector<Check> checks = {
      truncated_bounds,   conv_density_mass,     poisson_pmf_random,
      marginals_all,      post_processing,       order_invariance,
      ledger_monotone,    poisson_ordering,      factorization_marginal,
      naive_variance,     crossing_telescopes,   accountant_properties,
      fig2_determinism};
  std::vector<Outcome> out;
  for (Check check : checks) {
    try {
      out.push_back(check(options));
    } catch (const std::exception& e) {
      out.push_back({"I" + std::to_string(out.size() + 1), "invariant raised", false, e.what()});
    }
  }
  return out;
}

}  // namespace lossless::suite

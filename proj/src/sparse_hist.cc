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

#include "lossless/sparse_hist.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <string>
#include <unordered_set>
#include <utility>

#include <unsupported/Eigen/FFT>

#include "lossless/errors.hpp"

namespace lossless {
namespace {

// Pr[from + N(0, sd²) ∈ [lo, hi)], using whichever tail keeps precision.
double interval_mass(double lo, double hi, double from, double sd) {
  if (!(hi > lo)) return 0.0;
  const double a = (lo - from) / sd;
  const double b = (hi - from) / sd;
  if (a >= 0.0) return normal_upper_tail(a) - normal_upper_tail(b);
  if (b <= 0.0) return normal_upper_tail(-b) - normal_upper_tail(-a);
  return 1.0 - normal_upper_tail(-a) - normal_upper_tail(b);
}

void check_schedule(const std::vector<double>& budgets,
                    const std::vector<double>& thresholds, double delta2) {
  if (budgets.empty() || budgets.size() != thresholds.size()) {
    throw DomainError("need one threshold per budget");
  }
  if (!(delta2 > 0.0) || !std::isfinite(delta2)) {
    throw DomainError("sensitivity must be finite and positive");
  }
  double prev = 0.0;
  for (double rho : budgets) {
    if (!(rho > prev) || !std::isfinite(rho)) {
      throw DomainError("budgets must be finite, positive and increasing");
    }
    prev = rho;
  }
  for (double tau : thresholds) {
    if (std::isnan(tau) || tau == kInfinity) {
      throw DomainError("thresholds must be below +infinity");
    }
  }
}

void check_hist(const Histogram& hist) {
  if (hist.dimension < 1) throw DomainError("histogram dimension must be positive");
}

// Index of the first entry of a nondecreasing cumulative array exceeding
// u * total.
Eigen::Index pick_cumulative(const double* cdf, Eigen::Index size,
                             RandomSource& gen) {
  const double total = cdf[size - 1];
  if (!(total > 0.0)) throw NumericalError("no mass left to sample from");
  const double target = open_unit(gen) * total;
  const double* it = std::upper_bound(cdf, cdf + size, target);
  return std::min<Eigen::Index>(it - cdf, size - 1);
}

Eigen::SparseVector<double> to_sparse(
    Eigen::Index d, std::vector<std::pair<Eigen::Index, double>> entries) {
  std::sort(entries.begin(), entries.end());
  Eigen::SparseVector<double> out(d);
  out.reserve(static_cast<Eigen::Index>(entries.size()));
  for (const auto& [i, v] : entries) out.insertBack(i) = v;
  return out;
}

}  // namespace

Histogram Histogram::make(Eigen::Index dimension,
                          std::map<Eigen::Index, std::int64_t> counts) {
  if (dimension < 1) throw DomainError("histogram dimension must be positive");
  for (const auto& [i, c] : counts) {
    if (i < 0 || i >= dimension) throw DomainError("histogram index out of range");
    if (c == 0) throw DomainError("histogram stores nonzero counts only");
  }
  return Histogram{dimension, std::move(counts)};
}

double Histogram::count(Eigen::Index i) const {
  const auto it = counts.find(i);
  return it == counts.end() ? 0.0 : static_cast<double>(it->second);
}

Eigen::VectorXd Histogram::dense() const {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(dimension);
  for (const auto& [i, c] : counts) v[i] = static_cast<double>(c);
  return v;
}

Eigen::VectorXd naive_release(const Histogram& hist, NaiveHistState& state,
                              double rho, double tau, double delta2,
                              RandomSource& gen) {
  check_hist(hist);
  if (!(delta2 > 0.0) || !std::isfinite(delta2)) {
    throw DomainError("sensitivity must be finite and positive");
  }
  if (!std::isfinite(rho)) throw DomainError("rho must be finite");
  if (!(rho > state.rho_prev)) {
    throw GradualOrderError("histogram budgets must strictly increase");
  }
  if (std::isnan(tau)) throw DomainError("threshold is NaN");
  if (state.rho_prev == 0.0) state.z_prev = Eigen::VectorXd::Zero(hist.dimension);
  if (state.z_prev.size() != hist.dimension) {
    throw DomainError("state does not match histogram dimension");
  }

  const double carry = state.rho_prev / rho;
  const GaussianSpec fresh{0.0, 0.5 * delta2 * delta2 * (rho - state.rho_prev)};
  Eigen::VectorXd z(hist.dimension);
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    z[i] = carry * state.z_prev[i] + sample_gaussian(fresh, gen) / rho;
  }
  const Eigen::VectorXd noisy = hist.dense() + z;
  state.rho_prev = rho;
  state.z_prev = std::move(z);
  return (noisy.array() > tau).select(noisy, 0.0);
}

CrossingModel::CrossingModel(std::vector<double> budgets,
                             std::vector<double> thresholds, double delta2,
                             int nodes)
    : budgets_(std::move(budgets)),
      thresholds_(std::move(thresholds)),
      delta2_(delta2),
      n_(nodes) {
  check_schedule(budgets_, thresholds_, delta2_);
  if (n_ < 16 || n_ % 2 != 0) throw DomainError("grid needs an even node count >= 16");
  const int rounds = static_cast<int>(budgets_.size());
  const double half_width =
      10.0 * std::sqrt(0.5 * delta2_ * delta2_ * budgets_.back());
  h_ = 2.0 * half_width / n_;

  masses_.assign(rounds + 1, Eigen::VectorXd::Zero(n_));
  boundary_.assign(rounds + 1, -1);
  boundary_pos_.assign(rounds + 1, 0.0);
  top_.assign(rounds + 1, n_);
  log_survival_.assign(rounds + 1, 0.0);
  masses_[0][n_ / 2] = 1.0;

  int fft_size = 1;
  while (fft_size < 3 * n_) fft_size *= 2;
  Eigen::FFT<double> fft;
  std::vector<double> buf(fft_size);
  std::vector<std::complex<double>> spec_a;
  std::vector<std::complex<double>> spec_k;
  std::vector<double> conv;

  for (int level = 1; level <= rounds; ++level) {
    const double sd = step_sd(level);
    const double c = cut(level);
    const Eigen::VectorXd& prev = masses_[level - 1];
    Eigen::VectorXd& next = masses_[level];
    const int src_top = top_[level - 1];
    const int src_edge = boundary_[level - 1];

    // Truncation: cells wholly above c vanish, the cell holding c is partial.
    const double grid_lo = position(0, 0) - 0.5 * h_;
    if (c >= grid_lo + n_ * h_) {
      top_[level] = n_;
    } else if (c <= grid_lo) {
      top_[level] = 0;
    } else {
      const int jb = std::min(n_ - 1, static_cast<int>(std::floor((c - grid_lo) / h_)));
      boundary_[level] = jb;
      boundary_pos_[level] = 0.5 * (grid_lo + jb * h_ + c);
      top_[level] = jb + 1;
    }
    const int full_top = boundary_[level] >= 0 ? boundary_[level] : top_[level];

    if (full_top > 0 && src_top > 0) {
      // Sources on regular nodes, full target cells: one FFT convolution.
      std::fill(buf.begin(), buf.end(), 0.0);
      for (int i = 0; i < src_top; ++i) {
        if (i != src_edge) buf[i] = prev[i];
      }
      fft.fwd(spec_a, buf);
      std::fill(buf.begin(), buf.end(), 0.0);
      for (int t = 0; t < 2 * n_ - 1; ++t) {
        const double offset = (t - (n_ - 1)) * h_;
        buf[t] = interval_mass(offset - 0.5 * h_, offset + 0.5 * h_, 0.0, sd);
      }
      fft.fwd(spec_k, buf);
      for (int f = 0; f < fft_size; ++f) spec_a[f] *= spec_k[f];
      fft.inv(conv, spec_a);
      for (int j = 0; j < full_top; ++j) next[j] = std::max(0.0, conv[j + n_ - 1]);
      if (src_edge >= 0 && prev[src_edge] > 0.0) {
        const double from = boundary_pos_[level - 1];
        for (int j = 0; j < full_top; ++j) {
          next[j] += prev[src_edge] * cell_mass(level, j, from);
        }
      }
    }
    if (boundary_[level] >= 0) {
      const int jb = boundary_[level];
      double acc = 0.0;
      for (int i = 0; i < src_top; ++i) {
        if (prev[i] > 0.0) acc += prev[i] * cell_mass(level, jb, position(level - 1, i));
      }
      next[jb] = acc;
    }

    const double total = next.sum();
    if (total > 0.0 && log_survival_[level - 1] > -kInfinity) {
      next /= total;
      log_survival_[level] = log_survival_[level - 1] + std::log(total);
    } else {
      next.setZero();
      log_survival_[level] = -kInfinity;
    }
  }

  crossing_.assign(rounds + 1, 0.0);
  crossing_cdf_.assign(rounds + 1, Eigen::VectorXd());
  for (int r = 1; r <= rounds; ++r) {
    const double sd = step_sd(r);
    const double c = cut(r);
    if (r == 1) {
      crossing_[r] = normal_upper_tail(c / sd);
      continue;
    }
    if (log_survival_[r - 1] == -kInfinity) {
      crossing_[r] = std::nan("");
      continue;
    }
    Eigen::VectorXd cdf(n_);
    double acc = 0.0;
    for (int i = 0; i < n_; ++i) {
      const double m = masses_[r - 1][i];
      if (m > 0.0) acc += m * normal_upper_tail((c - position(r - 1, i)) / sd);
      cdf[i] = acc;
    }
    crossing_[r] = std::clamp(acc, 0.0, 1.0);
    crossing_cdf_[r] = std::move(cdf);
  }
}

double CrossingModel::step_sd(int r) const {
  const double prev = r > 1 ? budgets_[r - 2] : 0.0;
  return std::sqrt(0.5 * delta2_ * delta2_ * (budgets_[r - 1] - prev));
}

double CrossingModel::position(int level, int j) const {
  if (j == boundary_[level]) return boundary_pos_[level];
  return (j - n_ / 2) * h_;
}

double CrossingModel::cell_mass(int level, int j, double from) const {
  if (j >= top_[level]) return 0.0;
  const double x = (j - n_ / 2) * h_;
  const double hi = j == boundary_[level] ? cut(level) : x + 0.5 * h_;
  return interval_mass(x - 0.5 * h_, hi, from, step_sd(level));
}

bool CrossingModel::covers(const std::vector<double>& budgets,
                           const std::vector<double>& thresholds, double delta2,
                           int r) const {
  if (delta2 != delta2_ || r > rounds()) return false;
  if (budgets.size() < static_cast<std::size_t>(r) ||
      thresholds.size() < static_cast<std::size_t>(r)) {
    return false;
  }
  return std::equal(budgets.begin(), budgets.begin() + r, budgets_.begin()) &&
         std::equal(thresholds.begin(), thresholds.begin() + r,
                    thresholds_.begin());
}

double CrossingModel::crossing_probability(int r) const {
  if (r < 1 || r > rounds()) throw DomainError("round out of range");
  if (std::isnan(crossing_[r])) {
    throw NumericalError("no surviving mass before round " + std::to_string(r));
  }
  return crossing_[r];
}

double CrossingModel::survival(int r) const {
  if (r < 0 || r > rounds()) throw DomainError("round out of range");
  return std::exp(log_survival_[r]);
}

double CrossingModel::sample_first_crossing(int r, RandomSource& gen) const {
  const double p = crossing_probability(r);
  const double sd = step_sd(r);
  const double c = cut(r);
  if (r > 1 && !(p > 0.0)) throw NumericalError("crossing has zero probability");

  double prev_sum = 0.0;
  if (r > 1) {
    const Eigen::VectorXd& cdf = crossing_cdf_[r];
    // Given S_{r-1}, the crossing step does not depend on earlier rounds.
    const int node = static_cast<int>(pick_cumulative(cdf.data(), cdf.size(), gen));
    // Spread the chosen node over its cell.
    const double x = (node - n_ / 2) * h_;
    const double hi = node == boundary_[r - 1] ? cut(r - 1) : x + 0.5 * h_;
    const double lo = x - 0.5 * h_;
    prev_sum = lo + open_unit(gen) * (hi - lo);
  }
  double s = prev_sum +
             sample_truncated_gaussian(GaussianSpec{0.0, sd * sd}, c - prev_sum,
                                       kInfinity, gen);
  if (!(s > c)) s = std::nextafter(c, kInfinity);
  return s;
}

double crossing_probability(int r, const std::vector<double>& budgets,
                            const std::vector<double>& thresholds,
                            double delta2) {
  check_schedule(budgets, thresholds, delta2);
  if (r < 1 || r > static_cast<int>(budgets.size())) {
    throw DomainError("round out of range");
  }
  const std::vector<double> b(budgets.begin(), budgets.begin() + r);
  const std::vector<double> t(thresholds.begin(), thresholds.begin() + r);
  if (r == 1) {
    return normal_upper_tail(b[0] * t[0] / std::sqrt(0.5 * delta2 * delta2 * b[0]));
  }
  return CrossingModel(b, t, delta2).crossing_probability(r);
}

std::vector<Eigen::Index> sample_untaken(Eigen::Index d,
                                         const std::vector<Eigen::Index>& taken,
                                         std::int64_t q, RandomSource& gen) {
  const std::int64_t free = d - static_cast<std::int64_t>(taken.size());
  if (q < 0 || q > free) throw DomainError("cannot pick that many indices");
  // Floyd's algorithm on ranks among the free indices.
  std::unordered_set<std::int64_t> ranks;
  ranks.reserve(static_cast<std::size_t>(q));
  for (std::int64_t j = free - q; j < free; ++j) {
    std::uniform_int_distribution<std::int64_t> pick(0, j);
    const std::int64_t t = pick(gen);
    if (!ranks.insert(t).second) ranks.insert(j);
  }
  std::vector<std::int64_t> sorted(ranks.begin(), ranks.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<Eigen::Index> out;
  out.reserve(sorted.size());
  std::size_t skip = 0;
  for (std::int64_t t : sorted) {
    Eigen::Index idx = t + static_cast<Eigen::Index>(skip);
    while (skip < taken.size() && taken[skip] <= idx) {
      ++skip;
      idx = t + static_cast<Eigen::Index>(skip);
    }
    out.push_back(idx);
  }
  return out;
}

Eigen::SparseVector<double> efficient_release(const Histogram& hist,
                                              EffHistState& state, double rho,
                                              double tau, double delta2,
                                              RandomSource& gen) {
  check_hist(hist);
  if (!(delta2 > 0.0) || !std::isfinite(delta2)) {
    throw DomainError("sensitivity must be finite and positive");
  }
  if (!std::isfinite(rho)) throw DomainError("rho must be finite");
  const double rho_prev = state.budgets.empty() ? 0.0 : state.budgets.back();
  if (!(rho > rho_prev)) {
    throw GradualOrderError("histogram budgets must strictly increase");
  }
  if (std::isnan(tau) || tau == kInfinity) throw DomainError("bad threshold");
  if (state.round == 0) {
    state.tracked.clear();
    for (const auto& [i, c] : hist.counts) state.tracked.emplace(i, 0.0);
    state.delta2 = delta2;
    state.gaussian_draws = 0;
    state.activations = 0;
  } else if (delta2 != state.delta2) {
    throw DomainError("sensitivity changed between rounds");
  }

  const int r = state.round + 1;
  state.budgets.push_back(rho);
  state.thresholds.push_back(tau);
  const GaussianSpec step{0.0, 0.5 * delta2 * delta2 * (rho - rho_prev)};
  std::vector<std::pair<Eigen::Index, double>> out;

  for (auto& [i, sum] : state.tracked) {
    sum += sample_gaussian(step, gen);
    ++state.gaussian_draws;
    const double y = hist.count(i) + sum / rho;
    if (y > tau) out.emplace_back(i, y);
  }

  const std::int64_t untracked =
      hist.dimension - static_cast<std::int64_t>(state.tracked.size());
  if (untracked > 0) {
    if (!state.model ||
        !state.model->covers(state.budgets, state.thresholds, delta2, r)) {
      state.model = std::make_shared<const CrossingModel>(state.budgets,
                                                          state.thresholds, delta2);
    }
    const double p = state.model->crossing_probability(r);
    std::binomial_distribution<std::int64_t> binomial(untracked, p);
    const std::int64_t q = binomial(gen);
    if (q > 0) {
      std::vector<Eigen::Index> taken;
      taken.reserve(state.tracked.size());
      for (const auto& entry : state.tracked) taken.push_back(entry.first);
      for (Eigen::Index i : sample_untaken(hist.dimension, taken, q, gen)) {
        const double sum = state.model->sample_first_crossing(r, gen);
        state.gaussian_draws += r;
        ++state.activations;
        double y = sum / rho;
        if (!(y > tau)) y = std::nextafter(tau, kInfinity);
        state.tracked.emplace(i, sum);
        out.emplace_back(i, y);
      }
    }
  }
  state.round = r;
  return to_sparse(hist.dimension, std::move(out));
}

Eigen::SparseVector<double> static_threshold_simulate(const Histogram& hist,
                                                      double tau,
                                                      const ThresholdNoise& noise,
                                                      RandomSource& gen) {
  check_hist(hist);
  if (std::isnan(tau)) throw DomainError("threshold is NaN");
  std::vector<std::pair<Eigen::Index, double>> out;

  double p = 0.0;
  if (const auto* g = std::get_if<GaussianSpec>(&noise)) {
    validate(*g);
    if (!(g->variance > 0.0)) throw DomainError("noise variance must be positive");
    p = normal_upper_tail((tau - g->mean) / std::sqrt(g->variance));
  } else {
    const LaplaceSpec& l = std::get<LaplaceSpec>(noise);
    validate(l);
    p = 1.0 - laplace_cdf(l.scale, tau);
  }
  auto draw = [&]() {
    if (const auto* g = std::get_if<GaussianSpec>(&noise)) return sample_gaussian(*g, gen);
    return sample_laplace(std::get<LaplaceSpec>(noise), gen);
  };
  // Noise conditioned on exceeding tau.
  auto draw_above = [&]() {
    if (const auto* g = std::get_if<GaussianSpec>(&noise)) {
      return sample_truncated_gaussian(*g, tau, kInfinity, gen);
    }
    const double b = std::get<LaplaceSpec>(noise).scale;
    if (tau >= 0.0) return tau - b * std::log(open_unit(gen));
    const double positive = 0.5 / (1.0 - 0.5 * std::exp(tau / b));
    if (open_unit(gen) < positive) return -b * std::log(open_unit(gen));
    return -detail::sample_exponential_slope(1.0 / b, -tau, gen);
  };

  std::vector<Eigen::Index> taken;
  taken.reserve(hist.counts.size());
  for (const auto& [i, c] : hist.counts) {
    taken.push_back(i);
    const double y = static_cast<double>(c) + draw();
    if (y > tau) out.emplace_back(i, y);
  }
  const std::int64_t zeros = hist.dimension - hist.support_size();
  if (zeros > 0 && p > 0.0) {
    std::binomial_distribution<std::int64_t> binomial(zeros, std::min(p, 1.0));
    const std::int64_t q = binomial(gen);
    for (Eigen::Index i : sample_untaken(hist.dimension, taken, q, gen)) {
      double y = draw_above();
      if (!(y > tau)) y = std::nextafter(tau, kInfinity);
      out.emplace_back(i, y);
    }
  }
  return to_sparse(hist.dimension, std::move(out));
}

}  // namespace lossless

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

// lossless-dp: command-line front end for ledgers, histograms, accounting,
// the statistical suites and the variance experiment.
//
// Exit codes: 0 success, 1 statistical suite failure, 2 usage or input
// error (bad flags, malformed documents, out-of-domain or out-of-budget
// requests), 3 any other runtime failure (I/O, missing exact value).

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lossless/errors.hpp"
#include "lossless/factorization.hpp"
#include "lossless/harness/fig2.hpp"
#include "lossless/harness/suite.hpp"
#include "lossless/ledger_io.hpp"
#include "lossless/privacy_account.hpp"
#include "lossless/release_engine.hpp"
#include "lossless/sparse_hist.hpp"

namespace {

using lossless::kInfinity;
using nlohmann::json;

constexpr int kSuiteFailed = 1;
constexpr int kUsage = 2;
constexpr int kRuntime = 3;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string format = "json";
};

std::uint64_t resolve_seed(const Globals& g) {
  if (g.seed) return *g.seed;
  if (const char* env = std::getenv("LOSSLESS_DP_SEED")) {
    try {
      std::size_t used = 0;
      const std::uint64_t s = std::stoull(env, &used);
      if (used == std::string(env).size()) return s;
    } catch (const std::exception&) {
    }
    throw UsageError("LOSSLESS_DP_SEED is not an unsigned integer");
  }
  std::random_device rd;
  const std::uint64_t s = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  std::cerr << "seed " << s << "\n";
  return s;
}

void emit(const Globals& g, const std::string& text) {
  if (g.out.empty() || g.out == "-") {
    std::cout << text;
  } else {
    lossless::write_text_file(g.out, text);
  }
}

double parse_extended(const std::string& s) {
  if (s == "inf" || s == "infinity") return kInfinity;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw UsageError("not a number: " + s);
  }
  if (used != s.size()) throw UsageError("not a number: " + s);
  return v;
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(parse_extended(item));
  if (out.empty()) throw UsageError("empty list");
  return out;
}

Eigen::VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::string vector_csv(const Eigen::VectorXd& v, double rho) {
  std::ostringstream out;
  out.precision(17);
  out << "rho,index,value\n";
  for (Eigen::Index i = 0; i < v.size(); ++i) out << rho << ',' << i << ',' << v[i] << '\n';
  return out.str();
}

// ---------------------------------------------------------------------------

struct ReleaseArgs {
  std::string ledger;
  double rho = 0.0;
  std::string init_value;
  std::string mechanism = "gaussian";
  double sensitivity = 1.0;
  std::string rho_inf = "inf";
  bool trusted = false;
};

int run_release(const Globals& g, const ReleaseArgs& a) {
  lossless::RandomSource gen(resolve_seed(g));
  std::optional<lossless::Ledger> ledger;
  bool keep_secret = a.trusted;
  if (!a.init_value.empty()) {
    if (std::filesystem::exists(a.ledger)) {
      throw UsageError("ledger " + a.ledger + " exists; refusing to initialize over it");
    }
    ledger = lossless::Ledger::create(to_vector(parse_list(a.init_value)), a.sensitivity,
                                      lossless::parse_mechanism(a.mechanism),
                                      parse_extended(a.rho_inf), gen);
    if (!ledger->bounded() && !a.trusted) {
      std::cerr << "warning: exact value not stored (no --trusted-store); "
                   "the saved ledger can only repeat existing releases\n";
    }
  } else {
    ledger = lossless::read_ledger_file(a.ledger);
    keep_secret = keep_secret || ledger->secret().has_value();
  }
  const Eigen::VectorXd y = ledger->release(a.rho, gen);
  lossless::write_ledger_file(a.ledger, *ledger, keep_secret);
  if (g.format == "csv") {
    emit(g, vector_csv(y, a.rho));
  } else {
    emit(g, json{{"rho", a.rho}, {"value", lossless::vector_to_json(y)}}.dump(2) + "\n");
  }
  return 0;
}

// ---------------------------------------------------------------------------

struct HistogramArgs {
  std::string input;
  long long dimension = 0;
  std::string budgets;
  std::string thresholds;
  double delta2 = 1.0;
  std::string algorithm = "efficient";
};

lossless::Histogram read_histogram(const std::string& path, long long dimension) {
  const std::string text = lossless::read_text_file(path);
  std::map<Eigen::Index, std::int64_t> counts;
  const json doc = json::parse(text, nullptr, false);
  if (!doc.is_discarded() && doc.is_object()) {
    try {
      const auto d = doc.at("d").get<Eigen::Index>();
      for (const auto& [key, value] : doc.at("counts").items()) {
        const std::int64_t c = value.get<std::int64_t>();
        if (c != 0) counts[std::stoll(key)] = c;
      }
      return lossless::Histogram::make(d, std::move(counts));
    } catch (const json::exception& e) {
      throw lossless::ParseError(std::string("bad histogram document: ") + e.what());
    }
  }
  // CSV: index,count per line, optional header.
  if (dimension < 1) throw UsageError("CSV histograms need --dimension");
  std::stringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line.rfind("index", 0) == 0) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw lossless::ParseError("bad histogram line: " + line);
    try {
      const long long c = std::stoll(line.substr(comma + 1));
      if (c != 0) counts[std::stoll(line.substr(0, comma))] = c;
    } catch (const std::logic_error&) {
      throw lossless::ParseError("bad histogram line: " + line);
    }
  }
  return lossless::Histogram::make(dimension, std::move(counts));
}

int run_histogram(const Globals& g, const HistogramArgs& a) {
  const std::uint64_t seed = resolve_seed(g);
  lossless::RandomSource gen(seed);
  const lossless::Histogram hist = read_histogram(a.input, a.dimension);
  const std::vector<double> budgets = parse_list(a.budgets);
  const std::vector<double> taus = parse_list(a.thresholds);
  if (budgets.size() != taus.size()) throw UsageError("need one threshold per budget");

  json rounds = json::array();
  std::ostringstream csv;
  csv.precision(17);
  csv << "round,index,value\n";
  auto record = [&](std::size_t r, const std::vector<std::pair<Eigen::Index, double>>& v) {
    json counts = json::object();
    for (const auto& [i, y] : v) {
      counts[std::to_string(i)] = y;
      csv << r + 1 << ',' << i << ',' << y << '\n';
    }
    rounds.push_back({{"round", r + 1}, {"rho", budgets[r]}, {"tau", taus[r]},
                      {"d", hist.dimension}, {"released", counts}});
  };
  json manifest = {{"budgets", budgets}, {"thresholds", taus}, {"seed", seed},
                   {"algorithm", a.algorithm}, {"sensitivity", a.delta2}};
  if (a.algorithm == "naive") {
    lossless::NaiveHistState state;
    for (std::size_t r = 0; r < budgets.size(); ++r) {
      const Eigen::VectorXd y =
          lossless::naive_release(hist, state, budgets[r], taus[r], a.delta2, gen);
      std::vector<std::pair<Eigen::Index, double>> v;
      for (Eigen::Index i = 0; i < y.size(); ++i) if (y[i] != 0.0) v.emplace_back(i, y[i]);
      record(r, v);
    }
  } else if (a.algorithm == "efficient") {
    lossless::EffHistState state;
    state.model = std::make_shared<const lossless::CrossingModel>(budgets, taus, a.delta2);
    for (std::size_t r = 0; r < budgets.size(); ++r) {
      const Eigen::SparseVector<double> y =
          lossless::efficient_release(hist, state, budgets[r], taus[r], a.delta2, gen);
      std::vector<std::pair<Eigen::Index, double>> v;
      for (Eigen::SparseVector<double>::InnerIterator it(y); it; ++it) {
        v.emplace_back(it.index(), it.value());
      }
      record(r, v);
    }
    manifest["gaussian_draws"] = state.gaussian_draws;
    manifest["activations"] = state.activations;
  } else {
    throw UsageError("unknown algorithm " + a.algorithm);
  }
  if (g.format == "csv") {
    emit(g, csv.str());
  } else {
    emit(g, json{{"manifest", manifest}, {"rounds", rounds}}.dump(2) + "\n");
  }
  return 0;
}

// ---------------------------------------------------------------------------

struct FactArgs {
  std::string ledger;
  double rho = 0.0;
  std::string l_csv;
  std::string r_csv;
  std::string x;
  double sensitivity = 1.0;
  std::string rho_inf = "inf";
  bool trusted = false;
};

int run_fact(const Globals& g, const FactArgs& a) {
  lossless::RandomSource gen(resolve_seed(g));
  bool keep = a.trusted;
  std::optional<lossless::LoadedFactLedger> state;
  if (!a.x.empty()) {
    if (a.l_csv.empty() || a.r_csv.empty()) throw UsageError("--x needs --L and --R");
    if (std::filesystem::exists(a.ledger)) {
      throw UsageError("ledger " + a.ledger + " exists; refusing to initialize over it");
    }
    lossless::FactorizedQuery q = lossless::FactorizedQuery::make(
        lossless::read_matrix_csv(a.l_csv), lossless::read_matrix_csv(a.r_csv), a.sensitivity);
    lossless::FactLedger l =
        lossless::FactLedger::create(q, to_vector(parse_list(a.x)), parse_extended(a.rho_inf), gen);
    state.emplace(lossless::LoadedFactLedger{std::move(q), std::move(l)});
  } else {
    const json doc = json::parse(lossless::read_text_file(a.ledger), nullptr, false);
    if (doc.is_discarded()) throw lossless::ParseError("ledger is not valid JSON");
    state.emplace(lossless::fact_ledger_from_json(doc));
    keep = keep || state->ledger.exact_product().has_value();
  }
  const Eigen::VectorXd y = lossless::fact_release(state->ledger, state->query, a.rho, gen);
  lossless::write_text_file(
      a.ledger, lossless::fact_ledger_to_json(state->ledger, state->query, keep).dump(2) + "\n");
  if (g.format == "csv") {
    emit(g, vector_csv(y, a.rho));
  } else {
    emit(g, json{{"rho", a.rho},
                 {"left_invertible", state->query.left_invertible},
                 {"value", lossless::vector_to_json(y)}}
                .dump(2) + "\n");
  }
  return 0;
}

// ---------------------------------------------------------------------------

struct AccountArgs {
  std::string rhos;
  double delta2 = 1.0;
  double rho = 0.0;
  double lambda = 0.0;
  double delta = 1e-6;
  long long d = 1;
  double sens1 = 1.0;
  double sens2 = 1.0;
  double sens_inf = 1.0;
  bool simplified = false;
};

std::vector<lossless::ZcdpBudget> budgets_of(const std::string& list) {
  std::vector<lossless::ZcdpBudget> out;
  for (double r : parse_list(list)) out.push_back({r});
  return out;
}

int emit_number(const Globals& g, const std::string& key, double value) {
  if (g.format == "csv") {
    std::ostringstream out;
    out.precision(17);
    out << key << '\n' << value << '\n';
    emit(g, out.str());
  } else {
    emit(g, json{{key, value}}.dump() + "\n");
  }
  return 0;
}

int run_poisson(const Globals& g, const AccountArgs& a) {
  const lossless::PoissonBound b =
      a.simplified ? lossless::poisson_epsilon_unit(a.lambda, a.delta, a.d)
                   : lossless::poisson_epsilon(a.lambda, a.delta, a.d, a.sens1,
                                               a.sens2, a.sens_inf);
  if (const auto* f = std::get_if<lossless::PreconditionFailure>(&b)) {
    std::cerr << "precondition failed: " << f->reason << " (lambda must exceed "
              << f->min_lambda << ")\n";
    return kUsage;
  }
  const auto& p = std::get<lossless::ApproxDpParams>(b);
  if (g.format == "csv") {
    std::ostringstream out;
    out.precision(17);
    out << "epsilon,delta\n" << p.epsilon << ',' << p.delta << '\n';
    emit(g, out.str());
  } else {
    emit(g, json{{"epsilon", p.epsilon}, {"delta", p.delta}}.dump() + "\n");
  }
  return 0;
}

// ---------------------------------------------------------------------------

int run_suite(const Globals& g, bool quick, bool acceptance_only, bool invariants_only) {
  lossless::suite::Options options;
  options.quick = quick;
  if (g.seed) options.seed = *g.seed;
  std::vector<lossless::suite::Outcome> all;
  auto report = [&](const std::vector<lossless::suite::Outcome>& part) {
    for (const auto& o : part) {
      std::cout << lossless::suite::format_line(o) << std::endl;
      all.push_back(o);
    }
  };
  if (!invariants_only) report(lossless::suite::run_acceptance(options));
  if (!acceptance_only) report(lossless::suite::run_invariants(options));
  bool ok = true;
  for (const auto& o : all) ok = ok && o.pass;
  if (!g.out.empty()) {
    json doc = json::array();
    for (const auto& o : all) {
      doc.push_back({{"id", o.id}, {"title", o.title}, {"pass", o.pass}, {"detail", o.detail}});
    }
    lossless::write_text_file(g.out, doc.dump(2) + "\n");
  }
  return ok ? 0 : kSuiteFailed;
}

int run_fig2(const Globals& g, long long reps, const std::string& grid_spec,
             const std::string& mode) {
  lossless::fig2::ExperimentConfig config;
  config.repetitions = reps;
  config.seed = resolve_seed(g);
  const auto first = grid_spec.find(':');
  const auto second = grid_spec.find(':', first == std::string::npos ? 0 : first + 1);
  if (first == std::string::npos || second == std::string::npos) {
    throw UsageError("--grid-log expects lo:hi:n");
  }
  const double lo = parse_extended(grid_spec.substr(0, first));
  const double hi = parse_extended(grid_spec.substr(first + 1, second - first - 1));
  const double n = parse_extended(grid_spec.substr(second + 1));
  if (n < 1 || n != std::floor(n)) throw UsageError("grid size must be a positive integer");
  config.rho_grid = lossless::fig2::log_grid(lo, hi, static_cast<int>(n));
  if (mode == "lossless") {
    config.modes = {lossless::fig2::Mode::kLossless};
  } else if (mode == "independent") {
    config.modes = {lossless::fig2::Mode::kIndependent};
  } else if (mode != "both") {
    throw UsageError("unknown mode " + mode);
  }
  const auto rows = lossless::fig2::run_fig2(config);
  emit(g, g.format == "json" ? lossless::fig2::format_json(rows)
                             : lossless::fig2::format_csv(rows));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lossless multiple release for additive-noise mechanisms"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  std::uint64_t seed_value = 0;
  auto* seed_opt = app.add_option("--seed", seed_value, "random seed (else $LOSSLESS_DP_SEED)");
  app.add_option("--out", g.out, "output file (default stdout)");
  app.add_option("--format", g.format, "output format")
      ->check(CLI::IsMember({"csv", "json"}));

  ReleaseArgs rel;
  auto* release = app.add_subcommand("release", "release a query value at a privacy level");
  release->add_option("--ledger", rel.ledger, "ledger JSON file")->required();
  release->add_option("--rho", rel.rho, "privacy parameter")->required();
  release->add_option("--init", rel.init_value, "create the ledger for this comma-separated value");
  release->add_option("--mechanism", rel.mechanism, "noise family for --init")
      ->check(CLI::IsMember({"gaussian", "laplace", "poisson", "exponential"}));
  release->add_option("--sensitivity", rel.sensitivity, "query sensitivity for --init");
  release->add_option("--rho-inf", rel.rho_inf, "largest budget, or inf (gaussian only)");
  release->add_flag("--trusted-store", rel.trusted, "write the exact value into the ledger");

  HistogramArgs ha;
  auto* histogram = app.add_subcommand("histogram", "gradual thresholded histogram release");
  histogram->add_option("--input", ha.input, "histogram JSON {d, counts} or CSV index,count")
      ->required();
  histogram->add_option("--dimension", ha.dimension, "domain size for CSV input");
  histogram->add_option("--budgets", ha.budgets, "increasing rho per round, comma-separated")
      ->required();
  histogram->add_option("--thresholds", ha.thresholds, "tau per round, comma-separated")
      ->required();
  histogram->add_option("--sensitivity", ha.delta2, "l2 sensitivity");
  histogram->add_option("--algorithm", ha.algorithm, "naive or efficient")
      ->check(CLI::IsMember({"naive", "efficient"}));

  FactArgs fa;
  auto* fact = app.add_subcommand("fact-release", "factorization mechanism release");
  fact->add_option("--ledger", fa.ledger, "ledger JSON file")->required();
  fact->add_option("--rho", fa.rho, "privacy parameter")->required();
  fact->add_option("--L", fa.l_csv, "CSV matrix L for --x");
  fact->add_option("--R", fa.r_csv, "CSV matrix R for --x");
  fact->add_option("--x", fa.x, "create the ledger for this comma-separated data vector");
  fact->add_option("--sensitivity", fa.sensitivity, "l2 sensitivity of x -> Rx");
  fact->add_option("--rho-inf", fa.rho_inf, "largest budget, or inf");
  fact->add_flag("--trusted-store", fa.trusted, "write the exact product into the ledger");

  AccountArgs aa;
  auto* account = app.add_subcommand("account", "privacy accounting");
  account->require_subcommand(1);
  auto* compose = account->add_subcommand("compose", "sum of zCDP budgets");
  compose->add_option("--rho", aa.rhos, "comma-separated budgets")->required();
  auto* maxc = account->add_subcommand("max", "budget of releases from one lossless ledger");
  maxc->add_option("--rho", aa.rhos, "comma-separated budgets")->required();
  auto* sigma = account->add_subcommand("sigma", "gaussian noise standard deviation");
  sigma->add_option("--sensitivity", aa.delta2, "l2 sensitivity");
  sigma->add_option("--rho", aa.rho, "zCDP budget")->required();
  auto* poisson = account->add_subcommand("poisson", "(epsilon, delta) of the poisson mechanism");
  poisson->add_option("--lambda", aa.lambda, "poisson rate")->required();
  poisson->add_option("--delta", aa.delta, "delta");
  poisson->add_option("--d", aa.d, "dimension");
  poisson->add_option("--sens1", aa.sens1, "l1 sensitivity");
  poisson->add_option("--sens2", aa.sens2, "l2 sensitivity");
  poisson->add_option("--sens-inf", aa.sens_inf, "l-infinity sensitivity");
  poisson->add_flag("--simplified", aa.simplified, "unit-sensitivity two-term bound");

  bool quick = false;
  bool acceptance_only = false;
  bool invariants_only = false;
  auto* suite = app.add_subcommand("suite", "run the statistical acceptance batteries");
  suite->add_flag("--quick", quick, "reduced sample sizes");
  suite->add_flag("--acceptance-only", acceptance_only, "skip the property batteries");
  suite->add_flag("--invariants-only", invariants_only, "skip the acceptance criteria");

  long long reps = 1000000;
  std::string grid = "0.001:5:20";
  std::string mode = "both";
  auto* fig2 = app.add_subcommand("fig2", "variance of lossless vs independent releases");
  fig2->add_option("--reps", reps, "repetitions");
  fig2->add_option("--grid-log", grid, "log grid lo:hi:n");
  fig2->add_option("--mode", mode, "both, lossless or independent");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }
  if (*seed_opt) g.seed = seed_value;

  try {
    if (*release) return run_release(g, rel);
    if (*histogram) return run_histogram(g, ha);
    if (*fact) return run_fact(g, fa);
    if (*compose) {
      return emit_number(g, "rho", lossless::zcdp_compose(budgets_of(aa.rhos)).rho);
    }
    if (*maxc) {
      return emit_number(g, "rho", lossless::multiple_release_budget(budgets_of(aa.rhos)).rho);
    }
    if (*sigma) return emit_number(g, "sigma", lossless::gaussian_sigma(aa.delta2, aa.rho));
    if (*poisson) return run_poisson(g, aa);
    if (*suite) return run_suite(g, quick, acceptance_only, invariants_only);
    if (*fig2) {
      if (!app.get_option("--format")->count()) g.format = "csv";
      return run_fig2(g, reps, grid, mode);
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const lossless::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const lossless::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const lossless::BudgetExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const lossless::GradualOrderError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const lossless::UnsupportedError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntime;
  }
  return kUsage;
}

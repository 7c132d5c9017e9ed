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

#include "lossless/factorization.hpp"

#include <sstream>
#include <string>
#include <vector>

#include <Eigen/SVD>

#include "lossless/errors.hpp"
#include "lossless/ledger_io.hpp"

namespace lossless {

using nlohmann::json;

LeftInverse left_inverse_check(const Eigen::MatrixXd& L) {
  LeftInverse out;
  if (L.size() == 0 || L.rows() < L.cols()) return out;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(L, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  const double top = s.size() > 0 ? s[0] : 0.0;
  if (!(top > 0.0)) return out;
  if (s.minCoeff() <= 1e-10 * top) return out;
  out.invertible = true;
  out.pinv = svd.matrixV() * s.cwiseInverse().asDiagonal() *
             svd.matrixU().transpose();
  return out;
}

FactorizedQuery FactorizedQuery::make(Eigen::MatrixXd L, Eigen::MatrixXd R,
                                      double sensitivity) {
  if (L.size() == 0 || R.size() == 0) throw DomainError("empty factor");
  if (L.cols() != R.rows()) {
    throw DomainError("factor shapes do not match: L is " +
                      std::to_string(L.rows()) + "x" + std::to_string(L.cols()) +
                      ", R is " + std::to_string(R.rows()) + "x" +
                      std::to_string(R.cols()));
  }
  if (!L.allFinite() || !R.allFinite()) throw DomainError("factors must be finite");
  if (!(sensitivity > 0.0) || !std::isfinite(sensitivity)) {
    throw DomainError("sensitivity must be finite and positive");
  }
  FactorizedQuery q;
  q.left_invertible = left_inverse_check(L).invertible;
  q.L = std::move(L);
  q.R = std::move(R);
  q.sensitivity = sensitivity;
  return q;
}

FactLedger FactLedger::create(const FactorizedQuery& query,
                              const Eigen::VectorXd& x, double rho_inf,
                              RandomSource& gen) {
  if (x.size() != query.R.cols()) {
    throw DomainError("data vector length does not match R");
  }
  if (std::isinf(rho_inf)) {
    Ledger noise = Ledger::create(Eigen::VectorXd::Zero(query.R.rows()),
                                  query.sensitivity, Mechanism::kGaussian,
                                  rho_inf, gen);
    Eigen::VectorXd exact = query.L * (query.R * x);
    return FactLedger(std::move(noise), std::move(exact));
  }
  Ledger inner = Ledger::create(query.R * x, query.sensitivity,
                                Mechanism::kGaussian, rho_inf, gen);
  return FactLedger(std::move(inner), std::nullopt);
}

FactLedger FactLedger::restore(Ledger inner,
                               std::optional<Eigen::VectorXd> exact_product) {
  if (inner.mechanism() != Mechanism::kGaussian) {
    throw DomainError("factorization ledgers are gaussian");
  }
  if (inner.bounded() && exact_product) {
    throw DomainError("a bounded factorization ledger holds no exact product");
  }
  return FactLedger(std::move(inner), std::move(exact_product));
}

Eigen::VectorXd fact_release(FactLedger& ledger, const FactorizedQuery& query,
                             double rho, RandomSource& gen) {
  if (query.L.cols() != ledger.inner().dimension()) {
    throw DomainError("factorization does not match the ledger");
  }
  if (ledger.bounded()) return query.L * ledger.inner().release(rho, gen);
  if (!ledger.exact_product()) {
    throw MissingSecret("release needs the exact product, which was not loaded");
  }
  if (ledger.exact_product()->size() != query.L.rows()) {
    throw DomainError("exact product does not match L");
  }
  return *ledger.exact_product() + query.L * ledger.inner().release(rho, gen);
}

json fact_ledger_to_json(const FactLedger& ledger, const FactorizedQuery& query,
                         bool trusted_store) {
  // The unbounded inner ledger conditions on a zero vector, which reveals
  // nothing, so it is always written in full.
  json doc = ledger_to_json(ledger.inner(), !ledger.bounded());
  doc["L"] = matrix_to_json(query.L);
  doc["R"] = matrix_to_json(query.R);
  if (trusted_store && ledger.exact_product()) {
    doc["exact_product"] = vector_to_json(*ledger.exact_product());
  }
  return doc;
}

LoadedFactLedger fact_ledger_from_json(const json& doc) {
  try {
    FactorizedQuery query =
        FactorizedQuery::make(matrix_from_json(doc.at("L")),
                              matrix_from_json(doc.at("R")),
                              doc.at("sensitivity").get<double>());
    json inner_doc = doc;
    inner_doc.erase("L");
    inner_doc.erase("R");
    inner_doc.erase("exact_product");
    Ledger inner = ledger_from_json(inner_doc);
    std::optional<Eigen::VectorXd> exact;
    if (doc.contains("exact_product")) {
      exact = vector_from_json(doc.at("exact_product"));
    }
    FactLedger ledger = FactLedger::restore(std::move(inner), std::move(exact));
    return {std::move(query), std::move(ledger)};
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed factorization document: ") + e.what());
  } catch (const DomainError& e) {
    throw ParseError(std::string("invalid factorization document: ") + e.what());
  }
}

Eigen::MatrixXd parse_matrix_csv(std::string_view text) {
  std::vector<std::vector<double>> rows;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<double> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (cell.find_first_not_of(" \t", used) != std::string::npos) {
          throw ParseError("bad matrix cell '" + cell + "'");
        }
      } catch (const std::logic_error&) {
        throw ParseError("bad matrix cell '" + cell + "'");
      }
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ParseError("ragged matrix rows");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty() || rows.front().empty()) throw ParseError("empty matrix");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows.front().size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      m(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
    }
  }
  return m;
}

Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path) {
  return parse_matrix_csv(read_text_file(path));
}

std::string format_matrix_csv(const Eigen::MatrixXd& m) {
  std::ostringstream out;
  out.precision(17);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out << ',';
      out << m(r, c);
    }
    out << '\n';
  }
  return out.str();
}

Eigen::MatrixXd prefix_sum_matrix(Eigen::Index n) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  a.triangularView<Eigen::Lower>().setOnes();
  return a;
}

}  // namespace lossless

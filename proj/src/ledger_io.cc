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

#include "lossless/ledger_io.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <utility>

#include "lossless/errors.hpp"

namespace lossless {

using nlohmann::json;

json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Eigen::VectorXd vector_from_json(const json& j) {
  if (!j.is_array()) throw ParseError("expected an array of numbers");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ParseError("expected an array of numbers");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    out.push_back(vector_to_json(m.row(r).transpose()));
  }
  return out;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw ParseError("expected a non-empty matrix");
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), cols);
  for (std::size_t r = 0; r < j.size(); ++r) {
    const Eigen::VectorXd row = vector_from_json(j[r]);
    if (row.size() != cols || cols == 0) throw ParseError("ragged matrix rows");
    m.row(static_cast<Eigen::Index>(r)) = row.transpose();
  }
  return m;
}

json extended_real_to_json(double x) {
  if (x == kInfinity) return "inf";
  return x;
}

double extended_real_from_json(const json& j) {
  if (j.is_string() && j.get<std::string>() == "inf") return kInfinity;
  if (!j.is_number()) throw ParseError("expected a number or \"inf\"");
  return j.get<double>();
}

json ledger_to_json(const Ledger& ledger, bool trusted_store) {
  json doc;
  doc["version"] = kLedgerVersion;
  doc["mechanism"] = std::string(mechanism_name(ledger.mechanism()));
  doc["sensitivity"] = ledger.sensitivity();
  doc["rho_inf"] = extended_real_to_json(ledger.rho_inf());
  doc["dimension"] = ledger.dimension();
  json entries = json::array();
  for (const auto& [rho, value] : ledger.entries()) {
    entries.push_back({{"rho", rho}, {"value", vector_to_json(value)}});
  }
  doc["entries"] = std::move(entries);
  if (trusted_store && ledger.secret()) {
    doc["secret"] = vector_to_json(*ledger.secret());
  }
  return doc;
}

Ledger ledger_from_json(const json& doc) {
  try {
    if (!doc.is_object()) throw ParseError("ledger document must be an object");
    const int version = doc.at("version").get<int>();
    if (version != kLedgerVersion) {
      throw VersionMismatch("ledger version " + std::to_string(version) +
                            " is not supported");
    }
    const Mechanism mechanism =
        parse_mechanism(doc.at("mechanism").get<std::string>());
    const double sensitivity = doc.at("sensitivity").get<double>();
    const double rho_inf = extended_real_from_json(doc.at("rho_inf"));
    const auto dimension = doc.at("dimension").get<Eigen::Index>();
    std::map<double, Eigen::VectorXd> entries;
    for (const json& e : doc.at("entries")) {
      const double rho = e.at("rho").get<double>();
      if (!entries.emplace(rho, vector_from_json(e.at("value"))).second) {
        throw ParseError("duplicate ledger entry");
      }
    }
    std::optional<Eigen::VectorXd> secret;
    if (doc.contains("secret")) secret = vector_from_json(doc.at("secret"));
    return Ledger::restore(mechanism, sensitivity, rho_inf, dimension,
                           std::move(entries), std::move(secret));
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed ledger document: ") + e.what());
  } catch (const DomainError& e) {
    throw ParseError(std::string("invalid ledger document: ") + e.what());
  } catch (const UnsupportedError& e) {
    throw ParseError(std::string("invalid ledger document: ") + e.what());
  }
}

std::string save_ledger(const Ledger& ledger, bool trusted_store) {
  return ledger_to_json(ledger, trusted_store).dump(2);
}

Ledger load_ledger(std::string_view text) {
  json doc = json::parse(text.begin(), text.end(), nullptr, false);
  if (doc.is_discarded()) throw ParseError("ledger document is not valid JSON");
  return ledger_from_json(doc);
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

void write_ledger_file(const std::filesystem::path& path, const Ledger& ledger,
                       bool trusted_store) {
  write_text_file(path, save_ledger(ledger, trusted_store) + "\n");
}

Ledger read_ledger_file(const std::filesystem::path& path) {
  return load_ledger(read_text_file(path));
}

}  // namespace lossless

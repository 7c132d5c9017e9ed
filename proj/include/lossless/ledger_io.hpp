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

// Versioned JSON documents for ledgers. The exact query value is written
// only when the caller asks for a trusted store.

#ifndef LOSSLESS_LEDGER_IO_HPP_
#define LOSSLESS_LEDGER_IO_HPP_

#include <filesystem>
#include <string>
#include <string_view>

#include <Eigen/Core>
#include <json.hpp>

#include "lossless/release_engine.hpp"

namespace lossless {

inline constexpr int kLedgerVersion = 1;

nlohmann::json ledger_to_json(const Ledger& ledger, bool trusted_store);
Ledger ledger_from_json(const nlohmann::json& doc);

std::string save_ledger(const Ledger& ledger, bool trusted_store);
Ledger load_ledger(std::string_view text);

void write_ledger_file(const std::filesystem::path& path, const Ledger& ledger,
                       bool trusted_store);
Ledger read_ledger_file(const std::filesystem::path& path);

// Shared helpers for documents that embed vectors and matrices.
nlohmann::json vector_to_json(const Eigen::VectorXd& v);
Eigen::VectorXd vector_from_json(const nlohmann::json& j);
nlohmann::json matrix_to_json(const Eigen::MatrixXd& m);  // row-major
Eigen::MatrixXd matrix_from_json(const nlohmann::json& j);
nlohmann::json extended_real_to_json(double x);  // +inf becomes "inf"
double extended_real_from_json(const nlohmann::json& j);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace lossless

#endif  // LOSSLESS_LEDGER_IO_HPP_

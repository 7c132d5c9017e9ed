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

#ifndef LOSSLESS_ERRORS_HPP_
#define LOSSLESS_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace lossless {

// Parameter outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Requested privacy parameter exceeds the ledger's committed rho_inf.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Gradual-only algorithms received a non-increasing budget.
class GradualOrderError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnsupportedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A conditioning event whose probability underflows in binary64.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The exact query value is needed but was not restored from storage.
class MissingSecret : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class VersionMismatch : public ParseError {
 public:
  using ParseError::ParseError;
};

}  // namespace lossless

#endif  // LOSSLESS_ERRORS_HPP_

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

// Acceptance criteria and property batteries, each reported as one line.

#ifndef LOSSLESS_HARNESS_SUITE_HPP_
#define LOSSLESS_HARNESS_SUITE_HPP_

#include <cstdint>
#include <string>
#include <vector>

namespace lossless::suite {

struct Options {
  bool quick = false;  // reduced sample sizes for CI
  std::uint64_t seed = 20261016;
};

struct Outcome {
  std::string id;
  std::string title;
  bool pass = false;
  std::string detail;
};

std::vector<Outcome> run_acceptance(const Options& options);
std::vector<Outcome> run_invariants(const Options& options);

std::string format_line(const Outcome& outcome);

}  // namespace lossless::suite

#endif  // LOSSLESS_HARNESS_SUITE_HPP_

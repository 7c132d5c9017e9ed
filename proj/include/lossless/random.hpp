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

#ifndef LOSSLESS_RANDOM_HPP_
#define LOSSLESS_RANDOM_HPP_

#include <cstdint>
#include <random>

namespace lossless {

// Every sampler takes its random source by reference; one source per thread.
using RandomSource = std::mt19937_64;

// Independent stream `stream` of a run seeded with `seed`. Streams for
// distinct (seed, stream) pairs are decorrelated through std::seed_seq.
inline RandomSource make_substream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(stream >> 32), 0x5eedu};
  return RandomSource(seq);
}

// Uniform draw on the open interval (0, 1).
template <std::uniform_random_bit_generator G>
double open_unit(G& gen) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double u = unit(gen);
  while (u <= 0.0) u = unit(gen);
  return u;
}

}  // namespace lossless

#endif  // LOSSLESS_RANDOM_HPP_

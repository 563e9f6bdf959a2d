// Copyright 2026 The mixmc Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace mixmc {

// Default engine for all samplers. Per-chain streams come from
// StreamEngine(seed, index).
using Rng = std::mt19937_64;

inline Rng StreamEngine(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(stream >> 32), 0x6d33u};
  return Rng(seq);
}

// Uniform double in [0, 1) from the top 53 bits of one 64-bit draw.
// Works with any generator producing full 64-bit words.
template <typename Engine>
double Uniform01(Engine& rng) {
  static_assert(Engine::min() == 0 && Engine::max() == ~std::uint64_t{0},
                "engine must produce 64-bit words");
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, bound) by multiply-shift; bias is < bound / 2^64.
template <typename Engine>
int UniformIndex(Engine& rng, int bound) {
  const unsigned __int128 prod =
      static_cast<unsigned __int128>(rng()) * static_cast<unsigned __int128>(bound);
  return static_cast<int>(prod >> 64);
}

template <typename Engine>
std::vector<int> RandomPermutation(Engine& rng, int n) {
  std::vector<int> p(n);
  for (int i = 0; i < n; ++i) p[i] = i;
  for (int i = n - 1; i > 0; --i) std::swap(p[i], p[UniformIndex(rng, i + 1)]);
  return p;
}

}  // namespace mixmc

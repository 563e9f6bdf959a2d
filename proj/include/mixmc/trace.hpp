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
#include <string>
#include <vector>

#include "mixmc/subset.hpp"

namespace mixmc {

// Recorded chain states. All chains share the same recorded step indices.
struct Trace {
  int n = 0;
  int chains = 0;
  std::vector<long> steps;                 // recorded step indices
  std::vector<Subset> states;              // [chain * steps.size() + t]
  std::vector<std::int64_t> wallclock_ns;  // cumulative per chain, same layout

  // Metadata.
  std::string sampler;
  std::uint64_t seed = 0;
  long record_every = 1;

  int recorded() const { return static_cast<int>(steps.size()); }
  std::size_t index(int chain, int t) const {
    return static_cast<std::size_t>(chain) * steps.size() + t;
  }
  Subset state(int chain, int t) const { return states[index(chain, t)]; }
  bool indicator(int chain, int t, int v) const { return state(chain, t).Contains(v); }
  std::int64_t wallclock(int chain, int t) const { return wallclock_ns[index(chain, t)]; }
};

}  // namespace mixmc

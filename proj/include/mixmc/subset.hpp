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

#include <bit>
#include <cstdint>
#include <string>
#include <vector>

#include "mixmc/errors.hpp"

namespace mixmc {

// Largest ground set the sampling core supports; subsets are single words.
inline constexpr int kMaxGroundSetSize = 64;

// Limits for the dense exact oracle. Enumeration tables hold 2^n reals;
// dense transition matrices hold 4^n, hence the tighter spectral limit.
struct ExactLimits {
  int enumeration = 20;
  int spectral = 13;
};

// A subset of {0, ..., n-1} stored as a bit vector. Bit v set iff v in S.
class Subset {
 public:
  constexpr Subset() = default;
  constexpr explicit Subset(std::uint64_t bits) : bits_(bits) {}

  static constexpr Subset Empty() { return Subset(); }
  static constexpr Subset Full(int n) {
    return Subset(n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1);
  }
  static Subset FromElements(const std::vector<int>& elements) {
    Subset s;
    for (int v : elements) s.Insert(v);
    return s;
  }

  constexpr std::uint64_t bits() const { return bits_; }
  constexpr bool Contains(int v) const { return (bits_ >> v) & 1u; }
  constexpr int Size() const { return std::popcount(bits_); }
  constexpr bool IsEmpty() const { return bits_ == 0; }

  constexpr void Insert(int v) { bits_ |= std::uint64_t{1} << v; }
  constexpr void Erase(int v) { bits_ &= ~(std::uint64_t{1} << v); }
  constexpr void Flip(int v) { bits_ ^= std::uint64_t{1} << v; }

  constexpr Subset With(int v) const {
    return Subset(bits_ | (std::uint64_t{1} << v));
  }
  constexpr Subset Without(int v) const {
    return Subset(bits_ & ~(std::uint64_t{1} << v));
  }
  constexpr Subset Flipped(int v) const {
    return Subset(bits_ ^ (std::uint64_t{1} << v));
  }
  constexpr Subset Complement(int n) const {
    return Subset(~bits_ & Full(n).bits_);
  }

  // Index of the k-th smallest member (0-based). Requires k < Size().
  int NthMember(int k) const {
    std::uint64_t b = bits_;
    for (int i = 0; i < k; ++i) b &= b - 1;
    return std::countr_zero(b);
  }

  template <typename Fn>
  void ForEachMember(Fn&& fn) const {
    for (std::uint64_t b = bits_; b != 0; b &= b - 1) fn(std::countr_zero(b));
  }

  std::vector<int> Members() const {
    std::vector<int> out;
    out.reserve(Size());
    ForEachMember([&](int v) { out.push_back(v); });
    return out;
  }

  // "0110..." with element 0 first.
  std::string ToString(int n) const {
    std::string s(n, '0');
    for (int v = 0; v < n; ++v)
      if (Contains(v)) s[v] = '1';
    return s;
  }

  friend constexpr bool operator==(Subset, Subset) = default;
  friend constexpr auto operator<=>(Subset, Subset) = default;

 private:
  std::uint64_t bits_ = 0;
};

// Ground set V = {0, ..., n-1}.
class GroundSet {
 public:
  explicit GroundSet(int n) : n_(n) {
    if (n < 1 || n > kMaxGroundSetSize)
      throw DomainError("ground set size must be in [1, 64], got " +
                        std::to_string(n));
  }
  int size() const { return n_; }
  Subset Full() const { return Subset::Full(n_); }
  bool Valid(Subset s) const { return (s.bits() & ~Full().bits()) == 0; }

  // Number of subsets; only meaningful for enumerable sizes.
  std::uint64_t StateCount() const { return std::uint64_t{1} << n_; }

 private:
  int n_;
};

inline void RequireEnumerable(int n, int limit) {
  if (n > limit) throw LimitError(n, limit);
}

// All size-k subsets of an n-set in increasing bit order.
inline std::vector<Subset> SubsetsOfSize(int n, int k) {
  std::vector<Subset> out;
  if (k < 0 || k > n) return out;
  if (k == 0) {
    out.push_back(Subset());
    return out;
  }
  // Gosper's hack.
  std::uint64_t s = (std::uint64_t{1} << k) - 1;
  const std::uint64_t limit = std::uint64_t{1} << n;
  while (s < limit) {
    out.emplace_back(s);
    std::uint64_t c = s & (~s + 1);
    std::uint64_t r = s + c;
    s = (((r ^ s) >> 2) / c) | r;
  }
  return out;
}

}  // namespace mixmc

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

#include <cmath>
#include <random>
#include <vector>

#include "gtest/gtest.h"
#include "mixmc/models.hpp"
#include "mixmc/numeric.hpp"
#include "mixmc/random.hpp"
#include "mixmc/subset.hpp"

namespace mixmc {
namespace {

TEST(SubsetTest, BasicOperations) {
  Subset s = Subset::FromElements({0, 3, 5});
  EXPECT_EQ(s.Size(), 3);
  EXPECT_TRUE(s.Contains(3));
  EXPECT_FALSE(s.Contains(1));
  EXPECT_EQ(s.With(1).Size(), 4);
  EXPECT_EQ(s.Without(3), Subset::FromElements({0, 5}));
  EXPECT_EQ(s.Flipped(0), Subset::FromElements({3, 5}));
  EXPECT_EQ(s.Complement(6), Subset::FromElements({1, 2, 4}));
  EXPECT_EQ(s.NthMember(1), 3);
  EXPECT_EQ(s.Members(), (std::vector<int>{0, 3, 5}));
  EXPECT_EQ(s.ToString(6), "100101");
}

TEST(SubsetTest, FullSetAtWordBoundary) {
  EXPECT_EQ(Subset::Full(64).Size(), 64);
  EXPECT_EQ(Subset::Full(1).bits(), 1u);
  EXPECT_TRUE(Subset::Full(0).IsEmpty());
}

TEST(SubsetTest, GroundSetValidation) {
  EXPECT_THROW(GroundSet(0), DomainError);
  EXPECT_THROW(GroundSet(65), DomainError);
  GroundSet g(10);
  EXPECT_TRUE(g.Valid(Subset::Full(10)));
  EXPECT_FALSE(g.Valid(Subset::FromElements({10})));
  EXPECT_THROW(RequireEnumerable(21, 20), LimitError);
}

TEST(SubsetTest, SubsetsOfSizeEnumeratesBinomial) {
  const auto sets = SubsetsOfSize(8, 3);
  EXPECT_EQ(sets.size(), 56u);
  for (std::size_t i = 0; i < sets.size(); ++i) {
    EXPECT_EQ(sets[i].Size(), 3);
    if (i > 0) { EXPECT_LT(sets[i - 1].bits(), sets[i].bits()); }
  }
  EXPECT_EQ(SubsetsOfSize(5, 0).size(), 1u);
  EXPECT_EQ(SubsetsOfSize(5, 5).size(), 1u);
}

TEST(NumericTest, StableFunctions) {
  EXPECT_NEAR(Softplus(1000.0), 1000.0, 1e-12);
  EXPECT_NEAR(Softplus(-1000.0), 0.0, 1e-300);
  EXPECT_NEAR(Softplus(0.0), std::log(2.0), 1e-15);
  EXPECT_NEAR(Logistic(1e6), 1.0, 1e-15);
  EXPECT_NEAR(Logistic(-1e6), 0.0, 1e-15);
  const std::vector<double> xs = {1000.0, 1000.0};
  EXPECT_NEAR(LogSumExp(xs), 1000.0 + std::log(2.0), 1e-12);
  const std::vector<double> none = {kNegInf, kNegInf};
  EXPECT_EQ(LogSumExp(none), kNegInf);
}

TEST(RandomTest, StreamsAreDeterministicAndDistinct) {
  Rng a = StreamEngine(7, 0), b = StreamEngine(7, 0), c = StreamEngine(7, 1);
  const auto x = a(), y = b(), z = c();
  EXPECT_EQ(x, y);
  EXPECT_NE(x, z);
  Rng r = StreamEngine(1, 2);
  for (int i = 0; i < 1000; ++i) {
    const double u = Uniform01(r);
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
    EXPECT_LT(UniformIndex(r, 7), 7);
  }
  auto perm = RandomPermutation(r, 10);
  std::sort(perm.begin(), perm.end());
  for (int i = 0; i < 10; ++i) EXPECT_EQ(perm[i], i);
}

TEST(IsingTest, EvaluatesClosedForm) {
  const auto ising = IsingComplete::Critical(6);
  EXPECT_EQ(ising.Evaluate(Subset()), 0.0);
  EXPECT_NEAR(ising.Evaluate(Subset::FromElements({0, 1, 2})), -(2.0 * std::log(6.0) / 6.0) * 9.0,
              1e-12);
  EXPECT_NEAR(ising.Evaluate(Subset::FromElements({0, 1, 2})), -5.3753, 1e-4);
}

TEST(IsingTest, ComplementSymmetricAndSupermodular) {
  const auto ising = IsingComplete::Critical(8);
  for (std::uint64_t s = 0; s < 256; ++s)
    EXPECT_DOUBLE_EQ(ising.Evaluate(Subset(s)), ising.Evaluate(Subset(s).Complement(8)));
  for (std::uint64_t r = 0; r < 256; ++r)
    for (std::uint64_t s = r;; s = (s - 1) & r) {  // s subset of r
      for (int v = 0; v < 8; ++v) {
        if (Subset(r).Contains(v)) continue;
        const double gain_r = ising.Evaluate(Subset(r).With(v)) - ising.Evaluate(Subset(r));
        const double gain_s = ising.Evaluate(Subset(s).With(v)) - ising.Evaluate(Subset(s));
        EXPECT_GE(gain_r, gain_s - 1e-12);
      }
      if (s == 0) break;
    }
}

TEST(FacilityLocationTest, HandExample) {
  const FacilityLocation fl(Matrix::FromRows({{1, 2}, {3, 0}}));
  EXPECT_EQ(fl.Evaluate(Subset::FromElements({0, 1})), 5.0);
  EXPECT_EQ(fl.Evaluate(Subset()), 0.0);
  EXPECT_EQ(fl.Evaluate(Subset::FromElements({0})), 3.0);
}

TEST(FacilityLocationTest, MaxTermIsMonotone) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix c(6, 5);
  for (double& x : c.data) x = u(rng);
  const FacilityLocation fl(c);
  for (std::uint64_t s = 0; s < 64; ++s)
    for (int v = 0; v < 6; ++v)
      EXPECT_GE(fl.Evaluate(Subset(s).With(v)), fl.Evaluate(Subset(s)));
}

TEST(LogDetDppTest, IdentityKernel) {
  const LogDetDpp dpp(Matrix::FromRows({{1, 0}, {0, 1}}), 1.0);
  EXPECT_NEAR(dpp.Evaluate(Subset::FromElements({0})), std::log(2.0), 1e-15);
  EXPECT_NEAR(dpp.Evaluate(Subset::FromElements({0, 1})), 2 * std::log(2.0), 1e-15);
  EXPECT_EQ(dpp.Evaluate(Subset()), 0.0);
}

TEST(LogDetDppTest, RejectsAsymmetricAndIndefinite) {
  EXPECT_THROW(LogDetDpp(Matrix::FromRows({{1, 0.5}, {0, 1}}), 1.0), ModelError);
  const LogDetDpp bad(Matrix::FromRows({{-5, 0}, {0, 1}}), 1.0);
  EXPECT_THROW(bad.Evaluate(Subset::FromElements({0})), ModelError);
}

TEST(LogDetDppTest, SubmodularExhaustive) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  const int n = 7;
  Matrix a(n, 3);
  for (double& x : a.data) x = g(rng);
  Matrix k(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int t = 0; t < 3; ++t) k(i, j) += a(i, t) * a(j, t);
  const LogDetDpp dpp(k, 0.7);
  const std::uint64_t count = 1u << n;
  for (std::uint64_t r = 0; r < count; ++r)
    for (std::uint64_t s = r;; s = (s - 1) & r) {
      for (int v = 0; v < n; ++v) {
        if (Subset(r).Contains(v)) continue;
        const double gain_r = dpp.Evaluate(Subset(r).With(v)) - dpp.Evaluate(Subset(r));
        const double gain_s = dpp.Evaluate(Subset(s).With(v)) - dpp.Evaluate(Subset(s));
        ASSERT_LE(gain_r, gain_s + 1e-9);
      }
      if (s == 0) break;
    }
}

TEST(FlDiversityTest, AddsModularTerm) {
  const FlDiversity m({0.5, -1.0}, Matrix::FromRows({{1, 2}, {3, 0}}));
  EXPECT_DOUBLE_EQ(m.Evaluate(Subset::FromElements({0, 1})), 5.0 - 0.5);
  EXPECT_DOUBLE_EQ(m.Evaluate(Subset::FromElements({1})), 3.0 - 1.0);
}

TEST(ExplicitTableTest, LengthChecked) {
  EXPECT_THROW(ExplicitTable(3, std::vector<double>(7, 0.0)), ModelError);
  const ExplicitTable t(2, {0.0, 1.0, 2.0, 3.0});
  EXPECT_EQ(t.Evaluate(Subset::FromElements({0, 1})), 3.0);
}

TEST(ModelTest, VariantDispatchAndDeterminism) {
  const Model m = IsingComplete::Critical(5);
  EXPECT_EQ(m.kind(), "ising");
  EXPECT_EQ(m.size(), 5);
  const Subset s = Subset::FromElements({1, 2});
  EXPECT_EQ(m.Evaluate(s), m.Evaluate(s));
  ASSERT_NE(m.get_if<IsingComplete>(), nullptr);
  EXPECT_EQ(m.get_if<FacilityLocation>(), nullptr);
}

TEST(IncrementalEvaluatorTest, MatchesFullEvaluationAndCountsCalls) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix c(6, 4);
  for (double& x : c.data) x = u(rng);
  std::vector<double> w = {0.1, -0.2, 0.3, 0.0, 1.0, -1.0};
  for (const Model& model : {Model(FacilityLocation(c)), Model(FlDiversity(w, c)),
                             Model(IsingComplete::Critical(6))}) {
    IncrementalEvaluator eval(model);
    EXPECT_EQ(eval.oracle_calls(), 1);
    for (int v : {3, 0, 5}) {
      for (int cand = 0; cand < 6; ++cand)
        if (!eval.current().Contains(cand)) {
          EXPECT_NEAR(eval.ValueWith(cand), model.Evaluate(eval.current().With(cand)), 1e-12);
        }
      eval.Add(v, eval.ValueWith(v));
      EXPECT_NEAR(eval.value(), model.Evaluate(eval.current()), 1e-12);
    }
  }
}

TEST(CountingOracleTest, CountsEvaluations) {
  const IsingComplete ising(4, 1.0);
  const CountingOracle<IsingComplete> counted(ising);
  counted.Evaluate(Subset());
  counted.Evaluate(Subset::Full(4));
  EXPECT_EQ(counted.calls(), 2);
}

}  // namespace
}  // namespace mixmc

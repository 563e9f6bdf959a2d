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
#include <map>
#include <random>
#include <vector>

#include "gtest/gtest.h"
#include "mixmc/exact.hpp"
#include "mixmc/logmodular.hpp"
#include "mixmc/random.hpp"
#include "mixmc/semigrad.hpp"

namespace mixmc {
namespace {

MixtureProposal RandomMixture(int n, int r, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.5);
  std::vector<ModularFunction> comps;
  std::vector<double> lw;
  for (int i = 0; i < r; ++i) {
    std::vector<double> w(n);
    for (double& x : w) x = g(rng);
    comps.emplace_back(w);
    lw.push_back(g(rng));
  }
  return MixtureProposal(comps, lw);
}

TEST(LogPartitionTest, ClosedForms) {
  EXPECT_NEAR(LogPartition(ModularFunction(std::vector<double>(10, 0.0))), 10 * std::log(2.0), 1e-12);
  EXPECT_NEAR(LogPartition(ModularFunction({std::log(3.0), std::log(3.0)})), std::log(16.0), 1e-12);
  EXPECT_NEAR(LogPartition(ModularFunction({1000.0})), 1000.0, 1e-9);
  EXPECT_NEAR(LogPartition(ModularFunction({0.0}, 2.5)), 2.5 + std::log(2.0), 1e-12);
}

TEST(LogModularTest, VeryNegativeWeightsGiveEmptySet) {
  const LogModular d(ModularFunction(std::vector<double>(6, -1e6)));
  Rng rng = StreamEngine(1, 0);
  for (int i = 0; i < 100; ++i) EXPECT_TRUE(SampleLogModular(d, rng).IsEmpty());
}

TEST(LogModularTest, UniformSamplerCloseToUniform) {
  const LogModular d(ModularFunction(std::vector<double>(8, 0.0)));
  Rng rng = StreamEngine(2, 0);
  std::vector<double> counts(256, 0.0);
  const int draws = 1000000;
  for (int i = 0; i < draws; ++i) counts[d.Sample(rng).bits()] += 1.0;
  for (double& c : counts) c /= draws;
  const std::vector<double> uniform(256, 1.0 / 256);
  EXPECT_LE(TvDistance(counts, uniform), 0.01);
}

TEST(LogModularTest, FixedSeedReproduces) {
  const LogModular d(ModularFunction({0.3, -0.4, 1.2, 0.0, -2.0}));
  Rng a = StreamEngine(9, 3), b = StreamEngine(9, 3);
  for (int i = 0; i < 50; ++i) EXPECT_EQ(d.Sample(a), d.Sample(b));
}

TEST(MixtureTest, SingleUniformComponent) {
  const auto q = MixtureProposal::EqualMass({ModularFunction(std::vector<double>(5, 0.0))});
  for (std::uint64_t s = 0; s < 32; ++s) EXPECT_NEAR(MixtureLogPdf(q, Subset(s)), -5 * std::log(2.0), 1e-12);
}

TEST(MixtureTest, NormalizesAndMatchesPartitionIdentity) {
  const auto q = RandomMixture(8, 3, 4);
  const auto table = MixtureTable(q);
  double total = 0.0;
  for (double p : table) total += p;
  EXPECT_NEAR(total, 1.0, 1e-9);
  double zq = 0.0;
  for (int i = 0; i < q.num_components(); ++i)
    zq += std::exp(q.log_weight(i)) * std::exp(q.component_log_partition(i));
  EXPECT_NEAR(q.log_normalizer(), std::log(zq), 1e-12 * std::abs(std::log(zq)) + 1e-14);
}

TEST(MixtureTest, CurieWeissMixtureIsSymmetric) {
  const auto q = CurieWeissMixture(IsingComplete::Critical(11));
  EXPECT_NEAR(q.LogPdf(Subset()), q.LogPdf(Subset::Full(11)), 1e-12);
  EXPECT_NEAR(q.selection_probability(0), 0.5, 1e-12);
  EXPECT_NEAR(q.selection_probability(1), 0.5, 1e-12);
  // With w_i = 1 / Z_i each component contributes unit mass, so Z_q = 2.
  EXPECT_NEAR(q.log_normalizer(), std::log(2.0), 1e-12);
}

TEST(MixtureTest, SingleComponentSamplingReducesToLogModular) {
  const ModularFunction m({0.2, -1.0, 0.7, 0.0});
  const auto q = MixtureProposal::EqualMass({m});
  const LogModular d(m);
  Rng a = StreamEngine(5, 0), b = StreamEngine(5, 0);
  for (int i = 0; i < 200; ++i) {
    const Subset x = SampleMixture(q, a);
    (void)q.SampleComponent(b);  // one uniform for the component pick
    EXPECT_EQ(x, d.Sample(b));
  }
}

TEST(MixtureTest, SamplerMatchesDensity) {
  const auto q = RandomMixture(8, 2, 6);
  const auto exact = MixtureTable(q);
  Rng rng = StreamEngine(6, 0);
  std::vector<double> counts(256, 0.0);
  const int draws = 1000000;
  for (int i = 0; i < draws; ++i) counts[q.Sample(rng).bits()] += 1.0;
  for (double& c : counts) c /= draws;
  EXPECT_LE(TvDistance(counts, exact), 0.01);
}

TEST(MixtureTest, RejectsInvalidInput) {
  EXPECT_THROW(MixtureProposal({}, {}), DomainError);
  EXPECT_THROW(MixtureProposal({ModularFunction({0.0})}, {0.0, 1.0}), DomainError);
  EXPECT_THROW(MixtureProposal({ModularFunction({0.0}), ModularFunction({0.0, 1.0})}, {0.0, 0.0}),
               DomainError);
}

TEST(FixedSizeTest, PartitionValues) {
  const ModularFunction m({0.0, std::log(2.0), std::log(3.0), std::log(4.0)});
  EXPECT_NEAR(FixedSizeLogPartition(m, 2), std::log(35.0), 1e-12);
  EXPECT_NEAR(FixedSizeLogPartition(m, 0), 0.0, 1e-15);
  EXPECT_NEAR(FixedSizeLogPartition(ModularFunction({0.0, 0.0}), 1), std::log(2.0), 1e-15);
  EXPECT_THROW(FixedSizeLogPartition(m, 5), DomainError);
}

TEST(FixedSizeTest, ElementarySymmetricSumIdentity) {
  const ModularFunction m({0.4, -1.3, 2.2, 0.0, -0.5, 1.1, 0.7});
  std::vector<double> terms;
  for (int ell = 0; ell <= m.size(); ++ell) terms.push_back(FixedSizeLogPartition(m, ell));
  EXPECT_NEAR(LogSumExp(terms), LogPartition(m), 1e-9);
}

TEST(FixedSizeTest, FullSizeIsDeterministic) {
  Rng rng = StreamEngine(1, 1);
  const ModularFunction m({0.1, -3.0, 2.0});
  for (int i = 0; i < 20; ++i) EXPECT_EQ(SampleLogModularFixedSize(m, 3, rng), Subset::Full(3));
  for (int i = 0; i < 20; ++i) EXPECT_TRUE(SampleLogModularFixedSize(m, 0, rng).IsEmpty());
}

TEST(FixedSizeTest, PairProbability) {
  // Weights 1..4, size 2: e_2 = 35 and {2,3} has weight 3 * 4 = 12.
  const FixedSizeLogModular d(ModularFunction({0.0, std::log(2.0), std::log(3.0), std::log(4.0)}), 2);
  EXPECT_NEAR(std::exp(d.LogPdf(Subset::FromElements({2, 3}))), 12.0 / 35.0, 1e-12);
  Rng rng = StreamEngine(3, 0);
  int hits = 0;
  const int draws = 1000000;
  for (int i = 0; i < draws; ++i) hits += d.Sample(rng) == Subset::FromElements({2, 3});
  EXPECT_NEAR(static_cast<double>(hits) / draws, 12.0 / 35.0, 0.005);
}

TEST(FixedSizeTest, MatchesBruteForceConditional) {
  const ModularFunction m({0.4, -1.3, 2.2, 0.0, -0.5, 1.1});
  const int ell = 3;
  const FixedSizeLogModular d(m, ell);
  const auto sets = SubsetsOfSize(6, ell);
  std::vector<double> exact, counts(sets.size(), 0.0);
  std::map<std::uint64_t, int> index;
  double total = 0.0;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    index[sets[i].bits()] = static_cast<int>(i);
    exact.push_back(std::exp(m.Evaluate(sets[i])));
    total += exact.back();
  }
  for (std::size_t i = 0; i < sets.size(); ++i) {
    exact[i] /= total;
    EXPECT_NEAR(std::exp(d.LogPdf(sets[i])), exact[i], 1e-12);
  }
  Rng rng = StreamEngine(8, 0);
  const int draws = 1000000;
  for (int i = 0; i < draws; ++i) counts[index.at(d.Sample(rng).bits())] += 1.0 / draws;
  EXPECT_LE(TvDistance(counts, exact), 0.02);
}

TEST(FixedSizeTest, WrongSizeHasZeroDensity) {
  const FixedSizeLogModular d(ModularFunction({0.0, 0.0, 0.0}), 2);
  EXPECT_EQ(d.LogPdf(Subset::FromElements({0})), kNegInf);
}

TEST(FixedSizeMixtureTest, NormalizesOverSizeEll) {
  const auto q = RandomMixture(7, 3, 12);
  const FixedSizeMixture fq(q, 3);
  double total = 0.0;
  for (const Subset s : SubsetsOfSize(7, 3)) total += std::exp(fq.LogPdf(s));
  EXPECT_NEAR(total, 1.0, 1e-10);
  // Density is q conditioned on |S| = 3.
  double mass = 0.0;
  for (const Subset s : SubsetsOfSize(7, 3)) mass += std::exp(q.LogPdf(s));
  const Subset probe = Subset::FromElements({0, 2, 5});
  EXPECT_NEAR(std::exp(fq.LogPdf(probe)), std::exp(q.LogPdf(probe)) / mass, 1e-12);
}

}  // namespace
}  // namespace mixmc

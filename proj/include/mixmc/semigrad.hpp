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

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mixmc/errors.hpp"
#include "mixmc/exact.hpp"
#include "mixmc/logmodular.hpp"
#include "mixmc/models.hpp"
#include "mixmc/numeric.hpp"
#include "mixmc/random.hpp"
#include "mixmc/subset.hpp"

namespace mixmc {

// Element order; a bijection on {0, ..., n-1}.
using Permutation = std::vector<int>;

inline bool IsPermutation(std::span<const int> p, int n) {
  if (static_cast<int>(p.size()) != n) return false;
  std::vector<char> seen(n, 0);
  for (int v : p) {
    if (v < 0 || v >= n || seen[v]) return false;
    seen[v] = 1;
  }
  return true;
}

enum class PermutationMode { kGreedy, kRandom };
enum class SemigradientKind { kSub, kSuper };
// Range of the supergradient anchor size k. {0..n} admits the empty anchor.
enum class AnchorRange { kZeroToN, kOneToN };

struct ConstructionConfig {
  int r = 1;
  PermutationMode mode = PermutationMode::kGreedy;
  SemigradientKind kind = SemigradientKind::kSub;
  std::uint64_t seed = 0;
  AnchorRange anchor_range = AnchorRange::kZeroToN;
  // When non-empty, component i uses k = forced_k[i % size] instead of a draw.
  std::vector<int> forced_k;
};

struct Semigradient {
  ModularFunction m;
  // Supergradient anchor {sigma_1..sigma_k}; for subgradients the full set
  // (every prefix is an anchor, see `prefixes`).
  Subset anchor;
  int k = -1;
  std::vector<Subset> prefixes;  // subgradients only: S_0 = {}, ..., S_n = V
  long oracle_calls = 0;
};

// Greedy maximization of D(S) = F(S) - log sum_j exp(m_j(S)) (D = F for an
// empty mixture), always adding the not-yet-chosen element with the largest
// gain. Ties go to the lowest index. Uses incremental F evaluation: one
// oracle call per candidate plus one for F({}), n(n+1)/2 + 1 in total.
inline Permutation GreedyPermutation(const Model& model,
                                     std::span<const ModularFunction> mixture_so_far,
                                     long* oracle_calls = nullptr) {
  const int n = model.size();
  const int r = static_cast<int>(mixture_so_far.size());
  IncrementalEvaluator eval(model);
  std::vector<double> at_current(r, 0.0);  // m_j(A)
  std::vector<double> scratch(r);
  auto log_mix = [&](const std::vector<double>& vals) {
    return r == 0 ? 0.0 : LogSumExp(vals);
  };
  double d_current = eval.value() - log_mix(at_current);

  Permutation order;
  order.reserve(n);
  for (int step = 0; step < n; ++step) {
    int best = -1;
    double best_gain = 0.0;
    double best_value = 0.0;
    for (int v = 0; v < n; ++v) {
      if (eval.current().Contains(v)) continue;
      const double f = eval.ValueWith(v);
      for (int j = 0; j < r; ++j) scratch[j] = at_current[j] + mixture_so_far[j].weights[v];
      const double gain = (f - log_mix(scratch)) - d_current;
      if (best < 0 || gain > best_gain) {
        best = v;
        best_gain = gain;
        best_value = f;
      }
    }
    for (int j = 0; j < r; ++j) at_current[j] += mixture_so_far[j].weights[best];
    eval.Add(best, best_value);
    d_current = best_value - log_mix(at_current);
    order.push_back(best);
  }
  if (oracle_calls != nullptr) *oracle_calls = eval.oracle_calls();
  return order;
}

// Marginal gains along sigma: m_{sigma_t} = F(S_{t-1} + sigma_t) - F(S_{t-1}).
// A subgradient at every prefix S_t when F is submodular. n + 1 oracle calls.
inline Semigradient Subgradient(const Model& model, std::span<const int> sigma) {
  const int n = model.size();
  if (!IsPermutation(sigma, n)) throw DomainError("subgradient: sigma is not a permutation");
  IncrementalEvaluator eval(model);
  Semigradient g;
  g.m = ModularFunction(std::vector<double>(n, 0.0));
  g.prefixes.push_back(eval.current());
  for (int v : sigma) {
    const double f = eval.ValueWith(v);
    g.m.weights[v] = f - eval.value();
    eval.Add(v, f);
    g.prefixes.push_back(eval.current());
  }
  g.anchor = eval.current();
  g.k = n;
  g.oracle_calls = eval.oracle_calls();
  return g;
}

// Supergradient anchored at Y = {sigma_1..sigma_k}: members of Y get their
// gain with respect to V minus themselves, the rest their gain with respect
// to the empty set. Bounds F from above at Y when F is submodular; for a
// supermodular F the same weights bound it from below.
inline Semigradient SupergradientAt(const Model& model, std::span<const int> sigma, int k) {
  const int n = model.size();
  if (!IsPermutation(sigma, n)) throw DomainError("supergradient: sigma is not a permutation");
  if (k < 0 || k > n) throw DomainError("supergradient: k outside [0, n]");
  Semigradient g;
  g.m = ModularFunction(std::vector<double>(n, 0.0));
  g.k = k;
  const Subset full = Subset::Full(n);
  long calls = 0;
  const double f_full = k > 0 ? (++calls, model.Evaluate(full)) : 0.0;
  const double f_empty = k < n ? (++calls, model.Evaluate(Subset())) : 0.0;
  for (int t = 0; t < n; ++t) {
    const int v = sigma[t];
    ++calls;
    if (t < k) {
      g.m.weights[v] = f_full - model.Evaluate(full.Without(v));
      g.anchor.Insert(v);
    } else {
      g.m.weights[v] = model.Evaluate(Subset().With(v)) - f_empty;
    }
  }
  g.oracle_calls = calls;
  return g;
}

template <typename Engine>
Semigradient Supergradient(const Model& model, std::span<const int> sigma, Engine& rng,
                           AnchorRange range = AnchorRange::kZeroToN) {
  const int n = model.size();
  const int k = range == AnchorRange::kZeroToN ? UniformIndex(rng, n + 1)
                                               : 1 + UniformIndex(rng, n);
  return SupergradientAt(model, sigma, k);
}

struct ComponentRecord {
  Permutation sigma;
  int k = -1;  // anchor size (supergradients) or n (subgradients)
  Subset anchor;
  long oracle_calls = 0;
};

struct Construction {
  MixtureProposal mixture;
  std::vector<ComponentRecord> log;
};

// Iterative mixture construction: r rounds of (permutation, semigradient),
// then equal selection mass per component (w_i = 1 / Z_i).
inline Construction BuildMixture(const Model& model, const ConstructionConfig& config) {
  if (config.r < 1) throw DomainError("construction: r must be at least 1");
  const int n = model.size();
  for (int k : config.forced_k)
    if (k < 0 || k > n) throw DomainError("construction: forced k outside [0, n]");
  Rng rng = StreamEngine(config.seed, 0);
  std::vector<ModularFunction> components;
  std::vector<ComponentRecord> log;
  for (int i = 0; i < config.r; ++i) {
    ComponentRecord rec;
    if (config.mode == PermutationMode::kGreedy) {
      rec.sigma = GreedyPermutation(model, components, &rec.oracle_calls);
    } else {
      rec.sigma = RandomPermutation(rng, n);
    }
    Semigradient g;
    if (config.kind == SemigradientKind::kSub) {
      g = Subgradient(model, rec.sigma);
    } else if (!config.forced_k.empty()) {
      g = SupergradientAt(model, rec.sigma, config.forced_k[i % config.forced_k.size()]);
    } else {
      g = Supergradient(model, rec.sigma, rng, config.anchor_range);
    }
    rec.k = g.k;
    rec.anchor = g.anchor;
    rec.oracle_calls += g.oracle_calls;
    components.push_back(std::move(g.m));
    log.push_back(std::move(rec));
  }
  return {MixtureProposal::EqualMass(std::move(components)), std::move(log)};
}

// The two-component proposal for the complete-graph Ising model: the
// supergradients at {} and V, m_v = -/+ (2 beta / n)(n - 1), w_i = 1 / Z_i.
inline MixtureProposal CurieWeissMixture(const IsingComplete& ising) {
  const int n = ising.size();
  const double a = ising.coupling() * (n - 1);
  return MixtureProposal::EqualMass({ModularFunction(std::vector<double>(n, -a)),
                                     ModularFunction(std::vector<double>(n, a))});
}

// One component per set S_i with m_iv = +beta on S_i and -beta elsewhere,
// weighted w_i = pi(S_i) / Z_i. Converges to pi in TV as beta grows.
template <SetFunction F>
MixtureProposal ExhaustiveMixture(const F& model, double beta, ExactLimits limits = {}) {
  const int n = model.size();
  RequireEnumerable(n, limits.enumeration);
  if (!(beta > 0.0) || !std::isfinite(beta)) throw DomainError("exhaustive mixture: beta must be positive");
  const DistributionTable table = EnumerateDistribution(model, limits);
  std::vector<ModularFunction> comps;
  std::vector<double> log_w;
  comps.reserve(table.probs.size());
  log_w.reserve(table.probs.size());
  for (std::size_t s = 0; s < table.probs.size(); ++s) {
    std::vector<double> w(n);
    for (int v = 0; v < n; ++v) w[v] = Subset(s).Contains(v) ? beta : -beta;
    ModularFunction m(std::move(w));
    log_w.push_back(table.log_probs[s] - LogPartition(m));
    comps.push_back(std::move(m));
  }
  return MixtureProposal(std::move(comps), std::move(log_w));
}

// Exhaustive check of F(R) >= F(S) + m(R) - m(S) for all R (reversed for
// supergradients), S the anchor.
template <SetFunction F>
bool SemigradientCheck(const F& model, const ModularFunction& m, Subset anchor,
                       SemigradientKind kind, ExactLimits limits = {}, double tol = 1e-9) {
  const int n = model.size();
  RequireEnumerable(n, limits.enumeration);
  if (m.size() != n) throw DomainError("semigradient check: size mismatch");
  const double f_anchor = model.Evaluate(anchor);
  const double m_anchor = m.Evaluate(anchor);
  const std::size_t count = std::size_t{1} << n;
  for (std::size_t s = 0; s < count; ++s) {
    const Subset r(s);
    const double bound = f_anchor + m.Evaluate(r) - m_anchor;
    const double f = model.Evaluate(r);
    if (kind == SemigradientKind::kSub ? f < bound - tol : f > bound + tol) return false;
  }
  return true;
}

}  // namespace mixmc

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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "mixmc/errors.hpp"
#include "mixmc/logmodular.hpp"
#include "mixmc/models.hpp"
#include "mixmc/numeric.hpp"
#include "mixmc/random.hpp"
#include "mixmc/subset.hpp"
#include "mixmc/trace.hpp"

namespace mixmc {

// Current state of one chain with its cached log-potential. The proposal
// density of the current state is cached too so an M3 step costs one oracle
// call and O(n + r) arithmetic; any move that does not come from the
// proposal invalidates it.
struct ChainState {
  Subset current;
  double log_f = 0.0;
  long step_count = 0;
  double log_q = 0.0;
  bool log_q_valid = false;

  void MoveTo(Subset s, double f) {
    current = s;
    log_f = f;
    log_q_valid = false;
  }
};

template <SetFunction F>
ChainState MakeChainState(const F& model, Subset start) {
  ChainState st;
  st.current = start;
  st.log_f = model.Evaluate(start);
  return st;
}

using MixturePtr = std::shared_ptr<const MixtureProposal>;

struct GibbsSpec {};
struct M3Spec {
  MixturePtr q;
};
struct CombinedSpec {
  MixturePtr q;
  double alpha = 0.5;
};
struct GibbsSwapSpec {
  int ell = 0;
};
struct M3FixedSizeSpec {
  MixturePtr q;
  int ell = 0;
};
struct CombinedFixedSizeSpec {
  MixturePtr q;
  double alpha = 0.5;
  int ell = 0;
};

using SamplerSpec = std::variant<GibbsSpec, M3Spec, CombinedSpec, GibbsSwapSpec,
                                 M3FixedSizeSpec, CombinedFixedSizeSpec>;

inline std::string SamplerName(const SamplerSpec& spec) {
  static const char* kNames[] = {"gibbs",      "m3",           "combined",
                                 "gibbs-swap", "m3-fixed-size", "combined-fixed-size"};
  return kNames[spec.index()];
}

inline std::optional<int> FixedSize(const SamplerSpec& spec) {
  if (const auto* s = std::get_if<GibbsSwapSpec>(&spec)) return s->ell;
  if (const auto* s = std::get_if<M3FixedSizeSpec>(&spec)) return s->ell;
  if (const auto* s = std::get_if<CombinedFixedSizeSpec>(&spec)) return s->ell;
  return std::nullopt;
}

inline const MixtureProposal* SpecMixture(const SamplerSpec& spec) {
  return std::visit(
      [](const auto& s) -> const MixtureProposal* {
        if constexpr (requires { s.q; }) {
          return s.q.get();
        } else {
          return nullptr;
        }
      },
      spec);
}

inline void ValidateSpec(const SamplerSpec& spec, int n) {
  std::visit(
      [n](const auto& s) {
        if constexpr (requires { s.q; }) {
          if (!s.q) throw DomainError("sampler needs a proposal mixture");
          if (s.q->size() != n)
            throw DomainError("proposal mixture ground set does not match the model");
        }
        if constexpr (requires { s.alpha; }) {
          if (!(s.alpha > 0.0 && s.alpha < 1.0))
            throw DomainError("alpha must lie in (0, 1)");
        }
        if constexpr (requires { s.ell; }) {
          if (s.ell < 0 || s.ell > n) throw DomainError("ell must lie in [0, n]");
        }
      },
      spec);
}

// Single-site Gibbs: pick v uniformly, move to S xor {v} with probability
// logistic(F(R) - F(S)). One oracle call.
template <SetFunction F, typename Engine>
void GibbsStep(const F& model, ChainState& st, Engine& rng) {
  const int v = UniformIndex(rng, model.size());
  const Subset proposal = st.current.Flipped(v);
  const double f = model.Evaluate(proposal);
  const double u = Uniform01(rng);
  if (u < Logistic(f - st.log_f)) st.MoveTo(proposal, f);
  ++st.step_count;
}

// Metropolis step with a state-independent proposal. `Proposal` provides
// Sample(rng) and LogPdf(S). Proposing the current state is an accepted
// self-loop.
template <SetFunction F, typename Proposal, typename Engine>
void IndependenceStep(const F& model, const Proposal& q, ChainState& st, Engine& rng) {
  if (!st.log_q_valid) {
    st.log_q = q.LogPdf(st.current);
    st.log_q_valid = true;
  }
  const Subset proposal = q.Sample(rng);
  const double lq = q.LogPdf(proposal);
  const double f = model.Evaluate(proposal);
  const double log_accept = (f - lq) - (st.log_f - st.log_q);
  const double u = Uniform01(rng);
  if (log_accept >= 0.0 || u < std::exp(log_accept)) {
    st.current = proposal;
    st.log_f = f;
    st.log_q = lq;
  }
  ++st.step_count;
}

template <SetFunction F, typename Engine>
void M3Step(const F& model, const MixtureProposal& q, ChainState& st, Engine& rng) {
  IndependenceStep(model, q, st, rng);
}

// P_C = alpha P_G + (1 - alpha) P_M by a Bernoulli(alpha) branch.
template <SetFunction F, typename Engine>
void CombinedStep(const F& model, const MixtureProposal& q, double alpha, ChainState& st,
                  Engine& rng) {
  if (Uniform01(rng) < alpha) {
    GibbsStep(model, st, rng);
  } else {
    M3Step(model, q, st, rng);
  }
}

// Cardinality-preserving Gibbs: swap a member v for a non-member u, both
// uniform. No-op when ell is 0 or n.
template <SetFunction F, typename Engine>
void GibbsSwapStep(const F& model, ChainState& st, Engine& rng) {
  const int n = model.size();
  const int ell = st.current.Size();
  ++st.step_count;
  if (ell == 0 || ell == n) return;
  const int out = st.current.NthMember(UniformIndex(rng, ell));
  const int in = st.current.Complement(n).NthMember(UniformIndex(rng, n - ell));
  const Subset proposal = st.current.Without(out).With(in);
  const double f = model.Evaluate(proposal);
  const double u = Uniform01(rng);
  if (u < Logistic(f - st.log_f)) st.MoveTo(proposal, f);
}

template <SetFunction F, typename Engine>
void M3FixedSizeStep(const F& model, const FixedSizeMixture& q, ChainState& st, Engine& rng) {
  IndependenceStep(model, q, st, rng);
}

template <SetFunction F, typename Engine>
void CombinedFixedSizeStep(const F& model, const FixedSizeMixture& q, double alpha,
                           ChainState& st, Engine& rng) {
  if (Uniform01(rng) < alpha) {
    GibbsSwapStep(model, st, rng);
  } else {
    M3FixedSizeStep(model, q, st, rng);
  }
}

// A SamplerSpec bound to a model, with per-spec precomputation (the
// fixed-size proposal tables) done once and shared by every chain.
template <SetFunction F>
class Kernel {
 public:
  Kernel(const F& model, SamplerSpec spec) : model_(&model), spec_(std::move(spec)) {
    ValidateSpec(spec_, model.size());
    if (const auto* s = std::get_if<M3FixedSizeSpec>(&spec_))
      fixed_ = std::make_shared<FixedSizeMixture>(*s->q, s->ell);
    if (const auto* s = std::get_if<CombinedFixedSizeSpec>(&spec_))
      fixed_ = std::make_shared<FixedSizeMixture>(*s->q, s->ell);
  }

  const SamplerSpec& spec() const { return spec_; }

  template <typename Engine>
  void Step(ChainState& st, Engine& rng) const {
    switch (spec_.index()) {
      case 0:
        GibbsStep(*model_, st, rng);
        break;
      case 1:
        M3Step(*model_, *std::get<M3Spec>(spec_).q, st, rng);
        break;
      case 2: {
        const auto& s = std::get<CombinedSpec>(spec_);
        CombinedStep(*model_, *s.q, s.alpha, st, rng);
        break;
      }
      case 3:
        GibbsSwapStep(*model_, st, rng);
        break;
      case 4:
        M3FixedSizeStep(*model_, *fixed_, st, rng);
        break;
      default:
        CombinedFixedSizeStep(*model_, *fixed_, std::get<CombinedFixedSizeSpec>(spec_).alpha,
                              st, rng);
        break;
    }
  }

  // Initial state: a draw from the sampler's proposal when it has one,
  // otherwise uniform over all sets (or over size-ell sets). `init`
  // overrides the proposal.
  template <typename Engine>
  Subset InitialState(Engine& rng, const MixtureProposal* init = nullptr) const {
    const int n = model_->size();
    const MixtureProposal* q = init != nullptr ? init : SpecMixture(spec_);
    if (const auto ell = FixedSize(spec_)) {
      if (q != nullptr) {
        if (fixed_ && q == SpecMixture(spec_)) return fixed_->Sample(rng);
        return FixedSizeMixture(*q, *ell).Sample(rng);
      }
      return FixedSizeLogModular(ModularFunction(std::vector<double>(n, 0.0)), *ell).Sample(rng);
    }
    if (q != nullptr) return q->Sample(rng);
    Subset s;
    for (int v = 0; v < n; ++v)
      if (rng() >> 63) s.Insert(v);
    return s;
  }

 private:
  const F* model_;
  SamplerSpec spec_;
  std::shared_ptr<FixedSizeMixture> fixed_;
};

struct RunOptions {
  int chains = 1;
  long steps = 0;
  long record_every = 1;
  std::uint64_t seed = 0;
  int workers = 1;
  // Optional shared initial distribution (e.g. so Gibbs starts from the
  // same over-dispersed draws as the mixture samplers).
  MixturePtr init;
};

// Runs independent chains; chain c uses StreamEngine(seed, c). Step 0 (the
// initial state) and every record_every-th step are recorded. Output does
// not depend on the worker count.
template <SetFunction F>
Trace RunChains(const F& model, const SamplerSpec& spec, const RunOptions& opt) {
  if (opt.chains < 1) throw DomainError("chains must be positive");
  if (opt.steps < 0) throw DomainError("steps must be non-negative");
  if (opt.record_every < 1) throw DomainError("record_every must be positive");
  if (opt.init && opt.init->size() != model.size())
    throw DomainError("initial mixture ground set does not match the model");
  const Kernel<F> kernel(model, spec);

  Trace trace;
  trace.n = model.size();
  trace.chains = opt.chains;
  trace.sampler = SamplerName(spec);
  trace.seed = opt.seed;
  trace.record_every = opt.record_every;
  for (long t = 0; t <= opt.steps; t += opt.record_every) trace.steps.push_back(t);
  const std::size_t per_chain = trace.steps.size();
  trace.states.resize(per_chain * opt.chains);
  trace.wallclock_ns.resize(per_chain * opt.chains);

  auto run_one = [&](int c) {
    Rng rng = StreamEngine(opt.seed, static_cast<std::uint64_t>(c));
    ChainState st = MakeChainState(model, kernel.InitialState(rng, opt.init.get()));
    const auto start = std::chrono::steady_clock::now();
    std::size_t slot = static_cast<std::size_t>(c) * per_chain;
    trace.states[slot] = st.current;
    trace.wallclock_ns[slot] = 0;
    for (std::size_t t = 1; t < per_chain; ++t) {
      for (long k = 0; k < opt.record_every; ++k) kernel.Step(st, rng);
      ++slot;
      trace.states[slot] = st.current;
      trace.wallclock_ns[slot] = std::chrono::duration_cast<std::chrono::nanoseconds>(
                                     std::chrono::steady_clock::now() - start)
                                     .count();
    }
  };

  const int workers = std::clamp(opt.workers, 1, opt.chains);
  if (workers == 1) {
    for (int c = 0; c < opt.chains; ++c) run_one(c);
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (int c = w; c < opt.chains; c += workers) run_one(c);
      });
  }
  return trace;
}

}  // namespace mixmc

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
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mixmc/chains.hpp"
#include "mixmc/errors.hpp"
#include "mixmc/logmodular.hpp"
#include "mixmc/models.hpp"
#include "mixmc/numeric.hpp"
#include "mixmc/subset.hpp"

extern "C" void dsyevd_(const char* jobz, const char* uplo, const int* n, double* a,
                        const int* lda, double* w, double* work, const int* lwork, int* iwork,
                        const int* liwork, int* info);

namespace mixmc {

using DenseMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// pi(S) = exp(F(S) - log Z) over all 2^n subsets, indexed by bitmask.
struct DistributionTable {
  int n = 0;
  std::vector<double> probs;
  std::vector<double> log_probs;
  double log_z = 0.0;

  double pi_min() const { return *std::min_element(probs.begin(), probs.end()); }
};

template <SetFunction F>
DistributionTable EnumerateDistribution(const F& model, ExactLimits limits = {}) {
  const int n = model.size();
  RequireEnumerable(n, limits.enumeration);
  const std::size_t count = std::size_t{1} << n;
  DistributionTable t;
  t.n = n;
  t.log_probs.resize(count);
  for (std::size_t s = 0; s < count; ++s) t.log_probs[s] = model.Evaluate(Subset(s));
  t.log_z = LogSumExp(t.log_probs);
  t.probs.resize(count);
  for (std::size_t s = 0; s < count; ++s) {
    t.log_probs[s] -= t.log_z;
    t.probs[s] = std::exp(t.log_probs[s]);
  }
  return t;
}

inline std::vector<double> ExactMarginals(const DistributionTable& t) {
  std::vector<double> m(t.n, 0.0);
  for (std::size_t s = 0; s < t.probs.size(); ++s)
    Subset(s).ForEachMember([&](int v) { m[v] += t.probs[s]; });
  return m;
}

inline double TvDistance(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size())
    throw DomainError("tv distance: length mismatch (" + std::to_string(p.size()) + " vs " +
                      std::to_string(q.size()) + ")");
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) sum += std::abs(p[i] - q[i]);
  return 0.5 * sum;
}

// Exact density of a mixture over all 2^n sets.
inline std::vector<double> MixtureTable(const MixtureProposal& q, ExactLimits limits = {}) {
  RequireEnumerable(q.size(), limits.enumeration);
  std::vector<double> out(std::size_t{1} << q.size());
  for (std::size_t s = 0; s < out.size(); ++s) out[s] = std::exp(q.LogPdf(Subset(s)));
  return out;
}

// The states a chain lives on: all of 2^V, or the size-ell slice.
struct StateSpace {
  int n = 0;
  std::vector<Subset> states;
  std::vector<int> index;  // bitmask -> position, -1 when absent

  static StateSpace Full(int n) {
    StateSpace sp;
    sp.n = n;
    const std::size_t count = std::size_t{1} << n;
    sp.states.reserve(count);
    sp.index.resize(count);
    for (std::size_t s = 0; s < count; ++s) {
      sp.states.emplace_back(s);
      sp.index[s] = static_cast<int>(s);
    }
    return sp;
  }
  static StateSpace OfSize(int n, int ell) {
    StateSpace sp;
    sp.n = n;
    sp.states = SubsetsOfSize(n, ell);
    sp.index.assign(std::size_t{1} << n, -1);
    for (std::size_t i = 0; i < sp.states.size(); ++i)
      sp.index[sp.states[i].bits()] = static_cast<int>(i);
    return sp;
  }
  int size() const { return static_cast<int>(states.size()); }
};

struct TransitionMatrix {
  StateSpace space;
  DenseMatrix p;
};

// pi restricted to and renormalized over the space.
template <SetFunction F>
std::vector<double> StationaryOn(const F& model, const StateSpace& space) {
  std::vector<double> lp(space.size());
  for (int i = 0; i < space.size(); ++i) lp[i] = model.Evaluate(space.states[i]);
  const double lz = LogSumExp(lp);
  for (double& x : lp) x = std::exp(x - lz);
  return lp;
}

namespace internal {

inline void CompleteDiagonal(DenseMatrix& p) {
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    p(i, i) = 0.0;
    p(i, i) = 1.0 - p.row(i).sum();
  }
}

inline DenseMatrix GibbsMatrix(const StateSpace& sp, std::span<const double> f) {
  const int n = sp.n;
  DenseMatrix p = DenseMatrix::Zero(sp.size(), sp.size());
  for (int i = 0; i < sp.size(); ++i)
    for (int v = 0; v < n; ++v) {
      const int j = sp.index[sp.states[i].Flipped(v).bits()];
      p(i, j) = Logistic(f[j] - f[i]) / n;
    }
  CompleteDiagonal(p);
  return p;
}

inline DenseMatrix SwapMatrix(const StateSpace& sp, std::span<const double> f) {
  const int n = sp.n;
  DenseMatrix p = DenseMatrix::Zero(sp.size(), sp.size());
  for (int i = 0; i < sp.size(); ++i) {
    const Subset s = sp.states[i];
    const int ell = s.Size();
    if (ell == 0 || ell == n) continue;
    const double pairs = static_cast<double>(ell) * (n - ell);
    const Subset outside = s.Complement(n);
    s.ForEachMember([&](int out) {
      outside.ForEachMember([&](int in) {
        const int j = sp.index[s.Without(out).With(in).bits()];
        p(i, j) = Logistic(f[j] - f[i]) / pairs;
      });
    });
  }
  CompleteDiagonal(p);
  return p;
}

// Off-diagonals q(R) min{1, pi(R) q(S) / (pi(S) q(R))}.
inline DenseMatrix IndependenceMatrix(std::span<const double> f, std::span<const double> lq) {
  const Eigen::Index size = static_cast<Eigen::Index>(f.size());
  std::vector<double> importance(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) importance[i] = f[i] - lq[i];
  DenseMatrix p(size, size);
  for (Eigen::Index i = 0; i < size; ++i)
    for (Eigen::Index j = 0; j < size; ++j)
      p(i, j) = i == j ? 0.0 : std::exp(lq[j] + std::min(0.0, importance[j] - importance[i]));
  CompleteDiagonal(p);
  return p;
}

}  // namespace internal

// Transition matrix of a sampler from the closed-form step definitions.
template <SetFunction F>
TransitionMatrix BuildTransitionMatrix(const F& model, const SamplerSpec& spec,
                                       ExactLimits limits = {}) {
  const int n = model.size();
  RequireEnumerable(n, limits.enumeration);
  ValidateSpec(spec, n);
  TransitionMatrix tm;
  const auto ell = FixedSize(spec);
  tm.space = ell ? StateSpace::OfSize(n, *ell) : StateSpace::Full(n);
  if (tm.space.size() > (1 << limits.spectral))
    throw LimitError(n, limits.spectral);
  const StateSpace& sp = tm.space;

  std::vector<double> f(sp.size());
  for (int i = 0; i < sp.size(); ++i) f[i] = model.Evaluate(sp.states[i]);

  auto proposal_logs = [&]() {
    std::vector<double> lq(sp.size());
    const MixtureProposal& q = *SpecMixture(spec);
    if (ell) {
      const FixedSizeMixture fq(q, *ell);
      for (int i = 0; i < sp.size(); ++i) lq[i] = fq.LogPdf(sp.states[i]);
    } else {
      for (int i = 0; i < sp.size(); ++i) lq[i] = q.LogPdf(sp.states[i]);
    }
    return lq;
  };

  std::visit(
      [&](const auto& s) {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, GibbsSpec>) {
          tm.p = internal::GibbsMatrix(sp, f);
        } else if constexpr (std::is_same_v<S, GibbsSwapSpec>) {
          tm.p = internal::SwapMatrix(sp, f);
        } else if constexpr (std::is_same_v<S, M3Spec> || std::is_same_v<S, M3FixedSizeSpec>) {
          tm.p = internal::IndependenceMatrix(f, proposal_logs());
        } else if constexpr (std::is_same_v<S, CombinedSpec>) {
          tm.p = internal::IndependenceMatrix(f, proposal_logs());
          tm.p *= (1.0 - s.alpha);
          tm.p.noalias() += s.alpha * internal::GibbsMatrix(sp, f);
        } else {
          tm.p = internal::IndependenceMatrix(f, proposal_logs());
          tm.p *= (1.0 - s.alpha);
          tm.p.noalias() += s.alpha * internal::SwapMatrix(sp, f);
        }
      },
      spec);
  return tm;
}

inline double RowSumResidual(const DenseMatrix& p) {
  return (p.rowwise().sum().array() - 1.0).abs().maxCoeff();
}

// max |pi(S) P(S,R) - pi(R) P(R,S)|.
inline double DetailedBalanceResidual(const DenseMatrix& p, std::span<const double> pi) {
  if (static_cast<Eigen::Index>(pi.size()) != p.rows())
    throw DomainError("detailed balance: pi length does not match P");
  double worst = 0.0;
  for (Eigen::Index i = 0; i < p.rows(); ++i)
    for (Eigen::Index j = i + 1; j < p.cols(); ++j)
      worst = std::max(worst, std::abs(pi[i] * p(i, j) - pi[j] * p(j, i)));
  return worst;
}

// max |(pi P)(R) - pi(R)|.
inline double StationarityResidual(const DenseMatrix& p, std::span<const double> pi) {
  const Eigen::Map<const Eigen::RowVectorXd> row(pi.data(), static_cast<Eigen::Index>(pi.size()));
  return (row * p - row).cwiseAbs().maxCoeff();
}

inline DenseMatrix Lazify(const DenseMatrix& p) {
  DenseMatrix out = 0.5 * p;
  out.diagonal().array() += 0.5;
  return out;
}

struct SpectralReport {
  double gap = 0.0;
  double lambda2 = 0.0;
  std::vector<double> eigenvalues;  // descending
};

// Eigenvalues of a dense symmetric matrix, ascending (LAPACK dsyevd).
inline std::vector<double> SymmetricEigenvalues(Eigen::MatrixXd a) {
  const int n = static_cast<int>(a.rows());
  std::vector<double> w(n);
  if (n == 0) return w;
  const char jobz = 'N';
  const char uplo = 'L';
  int info = 0;
  int lwork = -1;
  int liwork = -1;
  double work_query = 0.0;
  int iwork_query = 0;
  dsyevd_(&jobz, &uplo, &n, a.data(), &n, w.data(), &work_query, &lwork, &iwork_query, &liwork,
          &info);
  // Some LAPACK builds report only the minimum workspace for jobz = 'N',
  // which forces unblocked tridiagonalization; leave room for 64-wide blocks.
  lwork = std::max(static_cast<int>(work_query), 2 * n + 64 * n);
  liwork = std::max(1, iwork_query);
  std::vector<double> work(std::max(1, lwork));
  std::vector<int> iwork(liwork);
  dsyevd_(&jobz, &uplo, &n, a.data(), &n, w.data(), work.data(), &lwork, iwork.data(), &liwork,
          &info);
  if (info != 0) throw std::runtime_error("dsyevd failed with info " + std::to_string(info));
  return w;
}

// Spectrum of a reversible P through D^{1/2} P D^{-1/2}, D = diag(pi).
inline SpectralReport SpectralGap(const DenseMatrix& p, std::span<const double> pi,
                                  double reversibility_tol = 1e-9) {
  const Eigen::Index size = p.rows();
  if (static_cast<Eigen::Index>(pi.size()) != size || p.cols() != size)
    throw DomainError("spectral gap: P must be square and match pi");
  for (double x : pi)
    if (!(x > 0.0)) throw DomainError("spectral gap: pi must be strictly positive");
  const double residual = DetailedBalanceResidual(p, pi);
  if (residual > reversibility_tol)
    throw DomainError("spectral gap: chain is not reversible (residual " +
                      std::to_string(residual) + ")");
  std::vector<double> root(size);
  for (Eigen::Index i = 0; i < size; ++i) root[i] = std::sqrt(pi[i]);
  Eigen::MatrixXd a(size, size);
  for (Eigen::Index j = 0; j < size; ++j)
    for (Eigen::Index i = j; i < size; ++i) {
      const double lower = root[i] * p(i, j) / root[j];
      const double upper = root[j] * p(j, i) / root[i];
      a(i, j) = 0.5 * (lower + upper);
    }
  SpectralReport rep;
  rep.eigenvalues = SymmetricEigenvalues(std::move(a));
  std::reverse(rep.eigenvalues.begin(), rep.eigenvalues.end());
  rep.lambda2 = size > 1 ? rep.eigenvalues[1] : rep.eigenvalues[0];
  rep.gap = size > 1 ? 1.0 - rep.lambda2 : 1.0;
  return rep;
}

struct MixingTimeBounds {
  double lower = 0.0;
  double upper = 0.0;
};

// (1/gamma - 1) log(1/(2 eps)) <= t_mix(eps) <= (1/gamma) log(1/(eps pi_min))
// for lazy, irreducible, reversible chains.
inline MixingTimeBounds MixingTimeBoundsFor(double gamma, double pi_min, double epsilon) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw DomainError("mixing time: gamma must be in (0, 1]");
  if (!(pi_min > 0.0 && pi_min <= 1.0)) throw DomainError("mixing time: pi_min must be in (0, 1]");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("mixing time: epsilon must be in (0, 1)");
  return {(1.0 / gamma - 1.0) * std::log(1.0 / (2.0 * epsilon)),
          (1.0 / gamma) * std::log(1.0 / (epsilon * pi_min))};
}

struct ProjectedChain {
  DenseMatrix p;
  std::vector<double> pi;
};

// Pbar(i, j) = (1 / pibar(i)) sum_{S in block i, R in block j} pi(S) P(S, R).
inline ProjectedChain ProjectChain(const DenseMatrix& p, std::span<const double> pi,
                                   std::span<const int> labels) {
  if (static_cast<Eigen::Index>(labels.size()) != p.rows() || pi.size() != labels.size())
    throw DomainError("projection: labels must cover every state");
  const int blocks = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
  ProjectedChain out;
  out.pi.assign(blocks, 0.0);
  out.p = DenseMatrix::Zero(blocks, blocks);
  std::vector<int> counts(blocks, 0);
  for (std::size_t s = 0; s < labels.size(); ++s) {
    if (labels[s] < 0) throw DomainError("projection: negative block label");
    ++counts[labels[s]];
    out.pi[labels[s]] += pi[s];
    for (std::size_t r = 0; r < labels.size(); ++r)
      out.p(labels[s], labels[r]) += pi[s] * p(s, r);
  }
  for (int b = 0; b < blocks; ++b) {
    if (counts[b] == 0) throw DomainError("projection: empty block " + std::to_string(b));
    out.p.row(b) /= out.pi[b];
  }
  return out;
}

// P restricted to `block`; rejected moves out of the block become self-loops.
inline DenseMatrix RestrictChain(const DenseMatrix& p, std::span<const int> block) {
  if (block.empty()) throw DomainError("restriction: empty block");
  const Eigen::Index k = static_cast<Eigen::Index>(block.size());
  DenseMatrix out(k, k);
  for (Eigen::Index a = 0; a < k; ++a)
    for (Eigen::Index b = 0; b < k; ++b) out(a, b) = a == b ? 0.0 : p(block[a], block[b]);
  internal::CompleteDiagonal(out);
  return out;
}

// pi conditioned on `block`.
inline std::vector<double> RestrictDistribution(std::span<const double> pi,
                                                std::span<const int> block) {
  std::vector<double> out;
  out.reserve(block.size());
  double mass = 0.0;
  for (int s : block) mass += pi[s];
  for (int s : block) out.push_back(pi[s] / mass);
  return out;
}

// Phi(A) = sum_{S in A, R not in A} pi(S) P(S, R) / pi(A).
inline double BottleneckRatio(const DenseMatrix& p, std::span<const double> pi,
                              std::span<const int> set) {
  if (set.empty()) throw DomainError("bottleneck ratio: empty set");
  std::vector<char> in(p.rows(), 0);
  for (int s : set) in[s] = 1;
  double flow = 0.0;
  double mass = 0.0;
  for (int s : set) {
    mass += pi[s];
    for (Eigen::Index r = 0; r < p.cols(); ++r)
      if (!in[r]) flow += pi[s] * p(s, r);
  }
  if (!(mass > 0.0)) throw DomainError("bottleneck ratio: set has zero mass");
  return flow / mass;
}

// d(t) = max_{X0} TV(P^t(X0, .), pi) for t = 1..T.
inline std::vector<double> ExactDistanceCurve(const DenseMatrix& p, std::span<const double> pi,
                                              int horizon) {
  std::vector<double> d;
  d.reserve(std::max(0, horizon));
  DenseMatrix pt = p;
  for (int t = 1; t <= horizon; ++t) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < pt.rows(); ++i) {
      double tv = 0.0;
      for (Eigen::Index j = 0; j < pt.cols(); ++j) tv += std::abs(pt(i, j) - pi[j]);
      worst = std::max(worst, 0.5 * tv);
    }
    d.push_back(worst);
    if (t < horizon) pt = (pt * p).eval();
  }
  return d;
}

// Omega_0 = {|S| < n/2} (plus |S| = n/2 for even n), Omega_1 = {|S| > n/2}.
inline std::vector<int> CardinalitySplitLabels(const StateSpace& sp) {
  std::vector<int> labels(sp.size());
  for (int i = 0; i < sp.size(); ++i) labels[i] = 2 * sp.states[i].Size() > sp.n ? 1 : 0;
  return labels;
}

inline std::vector<std::vector<int>> BlocksFromLabels(std::span<const int> labels) {
  const int blocks = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
  std::vector<std::vector<int>> out(blocks);
  for (std::size_t s = 0; s < labels.size(); ++s) out[labels[s]].push_back(static_cast<int>(s));
  return out;
}

// p_max = max_i max_{S in block i} sum_{R outside block i} P(S, R).
inline double MaxLeakage(const DenseMatrix& p, std::span<const int> labels) {
  double worst = 0.0;
  for (Eigen::Index s = 0; s < p.rows(); ++s) {
    double leak = 0.0;
    for (Eigen::Index r = 0; r < p.cols(); ++r)
      if (labels[r] != labels[s]) leak += p(s, r);
    worst = std::max(worst, leak);
  }
  return worst;
}

// Lower bound on the full gap from the projection gap, the smallest
// restriction gap and the maximal leakage probability.
inline double DecompositionGapBound(double projection_gap, double min_restriction_gap,
                                    double max_leakage) {
  return std::min(projection_gap / 3.0,
                  projection_gap * min_restriction_gap / (3.0 * max_leakage + projection_gap));
}

}  // namespace mixmc

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
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mixmc/errors.hpp"
#include "mixmc/models.hpp"
#include "mixmc/numeric.hpp"
#include "mixmc/random.hpp"
#include "mixmc/subset.hpp"

namespace mixmc {

// log sum_S exp(m(S)) = c + sum_v log(1 + exp(m_v)).
inline double LogPartition(const ModularFunction& m) {
  double sum = 0.0;
  for (double x : m.weights) sum += Softplus(x);
  return m.offset + sum;
}

// Product-of-Bernoullis distribution pi_m(S) = exp(m(S)) / Z_m with m
// normalized. The offset of the input is dropped; it cancels in pi_m.
class LogModular {
 public:
  explicit LogModular(ModularFunction m) : m_(m.Normalized()) {
    log_z_ = LogPartition(m_);
    p_.reserve(m_.weights.size());
    for (double x : m_.weights) p_.push_back(Logistic(x));
  }

  int size() const { return m_.size(); }
  const ModularFunction& function() const { return m_; }
  double log_partition() const { return log_z_; }
  double inclusion_probability(int v) const { return p_[v]; }
  double LogPdf(Subset s) const { return m_.Evaluate(s) - log_z_; }

  // One uniform per element, O(n).
  template <typename Engine>
  Subset Sample(Engine& rng) const {
    Subset s;
    for (int v = 0; v < size(); ++v)
      if (Uniform01(rng) < p_[v]) s.Insert(v);
    return s;
  }

 private:
  ModularFunction m_;
  double log_z_ = 0.0;
  std::vector<double> p_;
};

template <typename Engine>
Subset SampleLogModular(const LogModular& d, Engine& rng) {
  return d.Sample(rng);
}

// q(S) = (1 / Z_q) sum_i w_i exp(m_i(S)), with Z_q = sum_i w_i Z_i.
// Weights are carried in log space; w_i = 1/Z_i spans hundreds of orders of
// magnitude at n ~ 50.
class MixtureProposal {
 public:
  MixtureProposal(std::vector<ModularFunction> components, std::vector<double> log_weights)
      : log_w_(std::move(log_weights)) {
    if (components.empty()) throw DomainError("mixture needs at least one component");
    if (components.size() != log_w_.size())
      throw DomainError("mixture: one log-weight per component required");
    n_ = components.front().size();
    (void)GroundSet(n_);
    r_ = static_cast<int>(components.size());
    for (const auto& c : components) {
      if (c.size() != n_) throw DomainError("mixture: components disagree on n");
      for (double x : c.weights)
        if (!std::isfinite(x)) throw DomainError("mixture: non-finite component weight");
      components_.emplace_back(c);
    }
    for (double lw : log_w_)
      if (!std::isfinite(lw)) throw DomainError("mixture: weights must be positive and finite");

    by_element_.resize(static_cast<std::size_t>(n_) * r_);
    for (int i = 0; i < r_; ++i)
      for (int v = 0; v < n_; ++v)
        by_element_[static_cast<std::size_t>(v) * r_ + i] = components_[i].function().weights[v];

    std::vector<double> terms(r_);
    for (int i = 0; i < r_; ++i) terms[i] = log_w_[i] + components_[i].log_partition();
    log_zq_ = LogSumExp(terms);
    cdf_.resize(r_);
    double acc = 0.0;
    for (int i = 0; i < r_; ++i) {
      acc += std::exp(terms[i] - log_zq_);
      cdf_[i] = acc;
    }
  }

  // Equal selection probability for every component: w_i = 1 / Z_i.
  static MixtureProposal EqualMass(std::vector<ModularFunction> components) {
    std::vector<double> lw;
    lw.reserve(components.size());
    for (auto& c : components) {
      c = c.Normalized();
      lw.push_back(-LogPartition(c));
    }
    return MixtureProposal(std::move(components), std::move(lw));
  }

  int size() const { return n_; }
  int num_components() const { return r_; }
  const ModularFunction& component(int i) const { return components_[i].function(); }
  const LogModular& component_distribution(int i) const { return components_[i]; }
  double log_weight(int i) const { return log_w_[i]; }
  std::span<const double> log_weights() const { return log_w_; }
  double component_log_partition(int i) const { return components_[i].log_partition(); }
  double log_normalizer() const { return log_zq_; }
  double selection_probability(int i) const {
    return std::exp(log_w_[i] + components_[i].log_partition() - log_zq_);
  }

  // log sum_i w_i exp(m_i(S)), components summed in index order. O(n r).
  double LogUnnormalized(Subset s) const {
    thread_local std::vector<double> acc;
    acc.assign(log_w_.begin(), log_w_.end());
    s.ForEachMember([&](int v) {
      const double* row = &by_element_[static_cast<std::size_t>(v) * r_];
      for (int i = 0; i < r_; ++i) acc[i] += row[i];
    });
    return LogSumExp(acc);
  }

  double LogPdf(Subset s) const { return LogUnnormalized(s) - log_zq_; }

  template <typename Engine>
  int SampleComponent(Engine& rng) const {
    const double u = Uniform01(rng);
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return std::min(static_cast<int>(it - cdf_.begin()), r_ - 1);
  }

  // Component first, then a set from that component: O(n + log r).
  template <typename Engine>
  Subset Sample(Engine& rng) const {
    return components_[SampleComponent(rng)].Sample(rng);
  }

 private:
  int n_ = 0;
  int r_ = 0;
  std::vector<LogModular> components_;
  std::vector<double> log_w_;
  std::vector<double> by_element_;  // [v * r + i] = m_iv
  std::vector<double> cdf_;
  double log_zq_ = 0.0;
};

inline double MixtureLogPdf(const MixtureProposal& q, Subset s) { return q.LogPdf(s); }

template <typename Engine>
Subset SampleMixture(const MixtureProposal& q, Engine& rng) {
  return q.Sample(rng);
}

// exp(m(S)) restricted to |S| = ell. The normalizer is the elementary
// symmetric polynomial e_ell(x) with x_v = exp(m_v). Suffix tables
// log e_j(x_v, ..., x_{n-1}) are built in log space; sampling walks the
// elements in order and conditions on how many remain to be picked.
// O(n ell) to build and to sample.
class FixedSizeLogModular {
 public:
  FixedSizeLogModular(const ModularFunction& m, int ell)
      : weights_(m.weights), offset_(m.offset), n_(m.size()), ell_(ell) {
    if (ell < 0 || ell > n_)
      throw DomainError("fixed-size log-modular: ell = " + std::to_string(ell) +
                        " outside [0, " + std::to_string(n_) + "]");
    const int w = ell_ + 1;
    table_.assign(static_cast<std::size_t>(n_ + 1) * w, kNegInf);
    table_[static_cast<std::size_t>(n_) * w + 0] = 0.0;
    for (int v = n_ - 1; v >= 0; --v) {
      const double* next = &table_[static_cast<std::size_t>(v + 1) * w];
      double* cur = &table_[static_cast<std::size_t>(v) * w];
      cur[0] = 0.0;
      for (int j = 1; j <= ell_; ++j) cur[j] = LogAddExp(next[j], weights_[v] + next[j - 1]);
    }
  }

  int size() const { return n_; }
  int ell() const { return ell_; }
  // log sum_{|S| = ell} exp(m(S)), offset included.
  double log_partition() const { return offset_ + SuffixLog(0, ell_); }

  double LogPdf(Subset s) const {
    if (s.Size() != ell_) return kNegInf;
    double sum = 0.0;
    s.ForEachMember([&](int v) { sum += weights_[v]; });
    return sum - SuffixLog(0, ell_);
  }

  template <typename Engine>
  Subset Sample(Engine& rng) const {
    Subset s;
    int need = ell_;
    for (int v = 0; v < n_ && need > 0; ++v) {
      if (n_ - v == need) {
        for (int u = v; u < n_; ++u) s.Insert(u);
        break;
      }
      const double p = std::exp(weights_[v] + SuffixLog(v + 1, need - 1) - SuffixLog(v, need));
      if (Uniform01(rng) < p) {
        s.Insert(v);
        --need;
      }
    }
    return s;
  }

 private:
  double SuffixLog(int v, int j) const {
    return table_[static_cast<std::size_t>(v) * (ell_ + 1) + j];
  }

  std::vector<double> weights_;
  double offset_;
  int n_;
  int ell_;
  std::vector<double> table_;  // [(v) * (ell + 1) + j] = log e_j(x_v..x_{n-1})
};

inline double FixedSizeLogPartition(const ModularFunction& m, int ell) {
  return FixedSizeLogModular(m, ell).log_partition();
}

template <typename Engine>
Subset SampleLogModularFixedSize(const ModularFunction& m, int ell, Engine& rng) {
  return FixedSizeLogModular(m, ell).Sample(rng);
}

// The mixture q conditioned on |S| = ell: component i is chosen with
// probability proportional to w_i e_ell(exp(m_i)).
class FixedSizeMixture {
 public:
  FixedSizeMixture(const MixtureProposal& q, int ell) : q_(q), ell_(ell) {
    std::vector<double> terms(q.num_components());
    for (int i = 0; i < q.num_components(); ++i) {
      components_.emplace_back(q.component(i), ell);
      terms[i] = q.log_weight(i) + components_.back().log_partition();
    }
    log_norm_ = LogSumExp(terms);
    cdf_.resize(terms.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < terms.size(); ++i) {
      acc += std::exp(terms[i] - log_norm_);
      cdf_[i] = acc;
    }
  }

  int size() const { return q_.size(); }
  int ell() const { return ell_; }
  const MixtureProposal& base() const { return q_; }
  double log_normalizer() const { return log_norm_; }

  double LogPdf(Subset s) const {
    if (s.Size() != ell_) return kNegInf;
    return q_.LogUnnormalized(s) - log_norm_;
  }

  template <typename Engine>
  Subset Sample(Engine& rng) const {
    const double u = Uniform01(rng);
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    const int i = std::min(static_cast<int>(it - cdf_.begin()),
                           static_cast<int>(components_.size()) - 1);
    return components_[i].Sample(rng);
  }

 private:
  MixtureProposal q_;
  int ell_;
  std::vector<FixedSizeLogModular> components_;
  std::vector<double> cdf_;
  double log_norm_ = 0.0;
};

}  // namespace mixmc

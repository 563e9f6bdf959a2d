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
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "mixmc/errors.hpp"
#include "mixmc/trace.hpp"

namespace mixmc {

// Sentinel for chains that are each constant but disagree (W = 0, B > 0).
inline constexpr double kPsrfDivergent = std::numeric_limits<double>::infinity();

struct PsrfReport {
  std::vector<double> per_element;
  double aggregate = 1.0;  // max over elements
  double mean = 1.0;       // mean over elements
  int samples = 0;         // post-burn-in samples per chain
};

// Classic Gelman-Rubin from per-chain means and (unbiased) variances over
// `length` samples each: sqrt((L - 1)/L + B / (L W)).
inline double GelmanRubin(std::span<const double> means, std::span<const double> variances,
                          int length) {
  const int m = static_cast<int>(means.size());
  double grand = 0.0;
  double w = 0.0;
  for (int c = 0; c < m; ++c) {
    grand += means[c];
    w += variances[c];
  }
  grand /= m;
  w /= m;
  double between = 0.0;
  for (int c = 0; c < m; ++c) between += (means[c] - grand) * (means[c] - grand);
  between *= static_cast<double>(length) / (m - 1);
  const double l = static_cast<double>(length);
  if (w <= 0.0) return between <= 0.0 ? 1.0 : kPsrfDivergent;
  return std::sqrt((l - 1.0) / l + between / (l * w));
}

struct PsrfOptions {
  double burn_in_fraction = 0.0;
  // Split every chain into halves (split-R-hat).
  bool split_chains = false;
};

// PSRF of the single-element indicator series at each prefix length
// (number of recorded samples, strictly increasing). Burn-in is applied to
// each prefix.
inline std::vector<PsrfReport> PsrfCurve(const Trace& trace, std::span<const int> checkpoints,
                                         const PsrfOptions& opt = {}) {
  if (trace.chains < 2) throw DomainError("psrf: at least 2 chains required");
  if (!(opt.burn_in_fraction >= 0.0 && opt.burn_in_fraction < 1.0))
    throw DomainError("psrf: burn-in fraction must lie in [0, 1)");
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    if (checkpoints[i] < 1 || checkpoints[i] > trace.recorded())
      throw DomainError("psrf: checkpoint " + std::to_string(checkpoints[i]) +
                        " outside the trace");
    if (i > 0 && checkpoints[i] <= checkpoints[i - 1])
      throw DomainError("psrf: checkpoints must be strictly increasing");
  }
  const int n = trace.n;
  const int segments = opt.split_chains ? 2 : 1;
  const int m = trace.chains * segments;

  // Every position where a prefix count is needed.
  struct Window {
    int begin;
    int end;
  };
  std::vector<std::vector<Window>> windows(checkpoints.size());
  std::vector<int> marks;
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    const int end = checkpoints[i];
    const int begin = static_cast<int>(std::floor(opt.burn_in_fraction * end));
    const int len = (end - begin) / segments;
    if (end - begin < 4 || len < 2)
      throw DomainError("psrf: fewer than 4 post-burn-in samples at checkpoint " +
                        std::to_string(end));
    for (int s = 0; s < segments; ++s) {
      const Window w{begin + s * len, begin + (s + 1) * len};
      windows[i].push_back(w);
      marks.push_back(w.begin);
      marks.push_back(w.end);
    }
  }
  std::sort(marks.begin(), marks.end());
  marks.erase(std::unique(marks.begin(), marks.end()), marks.end());
  auto mark_index = [&](int pos) {
    return static_cast<int>(std::lower_bound(marks.begin(), marks.end(), pos) - marks.begin());
  };

  // prefix[(chain * marks + k) * n + v] = #{t < marks[k] : v in X_t}
  std::vector<long> prefix(static_cast<std::size_t>(trace.chains) * marks.size() * n, 0);
  std::vector<long> running(n);
  for (int c = 0; c < trace.chains; ++c) {
    std::fill(running.begin(), running.end(), 0);
    std::size_t k = 0;
    for (int t = 0; t <= trace.recorded() && k < marks.size(); ++t) {
      while (k < marks.size() && marks[k] == t) {
        std::copy(running.begin(), running.end(),
                  prefix.begin() + (static_cast<std::size_t>(c) * marks.size() + k) * n);
        ++k;
      }
      if (t < trace.recorded()) trace.state(c, t).ForEachMember([&](int v) { ++running[v]; });
    }
  }
  auto count = [&](int c, int pos, int v) {
    return prefix[(static_cast<std::size_t>(c) * marks.size() + mark_index(pos)) * n + v];
  };

  std::vector<PsrfReport> out;
  out.reserve(checkpoints.size());
  std::vector<double> means(m);
  std::vector<double> vars(m);
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    PsrfReport rep;
    rep.per_element.resize(n);
    const int len = windows[i][0].end - windows[i][0].begin;
    rep.samples = len;
    for (int v = 0; v < n; ++v) {
      int slot = 0;
      for (int c = 0; c < trace.chains; ++c)
        for (const Window& w : windows[i]) {
          const double ones = static_cast<double>(count(c, w.end, v) - count(c, w.begin, v));
          const double mean = ones / len;
          means[slot] = mean;
          // Binary series: sum of squares equals the count of ones.
          vars[slot] = std::max(0.0, (ones - ones * mean) / (len - 1));
          ++slot;
        }
      rep.per_element[v] = GelmanRubin(means, vars, len);
    }
    rep.aggregate = *std::max_element(rep.per_element.begin(), rep.per_element.end());
    double sum = 0.0;
    for (double x : rep.per_element) sum += x;
    rep.mean = sum / n;
    out.push_back(std::move(rep));
  }
  return out;
}

inline PsrfReport Psrf(const Trace& trace, const PsrfOptions& opt = {}) {
  const int full = trace.recorded();
  return PsrfCurve(trace, std::span<const int>(&full, 1), opt).front();
}

// Mean indicator per element, pooled over chains after burn-in.
inline std::vector<double> EmpiricalMarginals(const Trace& trace, double burn_in_fraction = 0.0) {
  if (!(burn_in_fraction >= 0.0 && burn_in_fraction < 1.0))
    throw DomainError("marginals: burn-in fraction must lie in [0, 1)");
  const int begin = static_cast<int>(std::floor(burn_in_fraction * trace.recorded()));
  std::vector<long> ones(trace.n, 0);
  long total = 0;
  for (int c = 0; c < trace.chains; ++c)
    for (int t = begin; t < trace.recorded(); ++t) {
      trace.state(c, t).ForEachMember([&](int v) { ++ones[v]; });
      ++total;
    }
  std::vector<double> out(trace.n, 0.0);
  if (total == 0) return out;
  for (int v = 0; v < trace.n; ++v) out[v] = static_cast<double>(ones[v]) / total;
  return out;
}

}  // namespace mixmc

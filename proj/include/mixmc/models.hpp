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
#include <concepts>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "mixmc/errors.hpp"
#include "mixmc/subset.hpp"

namespace mixmc {

// Anything that maps subsets of {0..size()-1} to a real log-potential.
template <typename F>
concept SetFunction = requires(const F& f, Subset s) {
  { f.size() } -> std::convertible_to<int>;
  { f.Evaluate(s) } -> std::convertible_to<double>;
};

// m(S) = offset + sum_{v in S} weights[v]. Normalized when offset == 0.
struct ModularFunction {
  double offset = 0.0;
  std::vector<double> weights;

  ModularFunction() = default;
  explicit ModularFunction(std::vector<double> w, double c = 0.0)
      : offset(c), weights(std::move(w)) {}

  int size() const { return static_cast<int>(weights.size()); }
  double Evaluate(Subset s) const {
    double sum = offset;
    s.ForEachMember([&](int v) { sum += weights[v]; });
    return sum;
  }
  bool normalized() const { return offset == 0.0; }
  ModularFunction Normalized() const { return ModularFunction(weights); }
};

// Row-major dense matrix used for model parameters.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(int r, int c, double fill = 0.0)
      : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, fill) {}
  static Matrix FromRows(const std::vector<std::vector<double>>& rows_in) {
    Matrix m;
    m.rows = static_cast<int>(rows_in.size());
    m.cols = rows_in.empty() ? 0 : static_cast<int>(rows_in.front().size());
    m.data.reserve(static_cast<std::size_t>(m.rows) * m.cols);
    for (const auto& r : rows_in) {
      if (static_cast<int>(r.size()) != m.cols)
        throw DomainError("matrix rows have inconsistent lengths");
      m.data.insert(m.data.end(), r.begin(), r.end());
    }
    return m;
  }

  double& operator()(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
  double operator()(int r, int c) const {
    return data[static_cast<std::size_t>(r) * cols + c];
  }
  friend bool operator==(const Matrix&, const Matrix&) = default;
};

// Curie-Weiss model: F(S) = -(2 beta / n) |S| (n - |S|).
class IsingComplete {
 public:
  IsingComplete(int n, double beta) : n_(n), beta_(beta) {
    (void)GroundSet(n);
    if (!std::isfinite(beta)) throw ModelError("ising: beta must be finite");
  }
  // beta = ln(n), the regime with a single exponential bottleneck.
  static IsingComplete Critical(int n) { return IsingComplete(n, std::log(n)); }

  int size() const { return n_; }
  double beta() const { return beta_; }
  double coupling() const { return 2.0 * beta_ / n_; }
  double Evaluate(Subset s) const {
    const int k = s.Size();
    return -coupling() * static_cast<double>(k) * static_cast<double>(n_ - k);
  }

 private:
  int n_;
  double beta_;
};

// F(S) = sum_j max_{i in S} c_ij, with the max over the empty set taken as 0.
class FacilityLocation {
 public:
  explicit FacilityLocation(Matrix c) : c_(std::move(c)) {
    (void)GroundSet(c_.rows);
    if (c_.cols < 1) throw ModelError("facility location: need at least one column");
    for (double x : c_.data)
      if (!std::isfinite(x)) throw ModelError("facility location: non-finite entry");
    transposed_.resize(c_.data.size());
    for (int i = 0; i < c_.rows; ++i)
      for (int j = 0; j < c_.cols; ++j)
        transposed_[static_cast<std::size_t>(j) * c_.rows + i] = c_(i, j);
  }

  int size() const { return c_.rows; }
  const Matrix& matrix() const { return c_; }

  double Evaluate(Subset s) const {
    if (s.IsEmpty()) return 0.0;
    int members[kMaxGroundSetSize];
    int k = 0;
    s.ForEachMember([&](int v) { members[k++] = v; });
    const int n = c_.rows;
    double total = 0.0;
    for (int j = 0; j < c_.cols; ++j) {
      const double* col = &transposed_[static_cast<std::size_t>(j) * n];
      double best = col[members[0]];
      for (int t = 1; t < k; ++t) best = std::max(best, col[members[t]]);
      total += best;
    }
    return total;
  }

 private:
  Matrix c_;
  std::vector<double> transposed_;  // column j contiguous
};

// F(S) = log det(K_SS + sigma^2 I), F(empty) = 0.
class LogDetDpp {
 public:
  LogDetDpp(Matrix k, double sigma) : k_(std::move(k)), sigma_(sigma) {
    (void)GroundSet(k_.rows);
    if (k_.rows != k_.cols) throw ModelError("log-det dpp: kernel must be square");
    if (!(sigma > 0) || !std::isfinite(sigma))
      throw ModelError("log-det dpp: sigma must be positive");
    for (int i = 0; i < k_.rows; ++i)
      for (int j = 0; j < i; ++j)
        if (std::abs(k_(i, j) - k_(j, i)) > 1e-9)
          throw ModelError("log-det dpp: kernel is not symmetric");
  }

  int size() const { return k_.rows; }
  const Matrix& kernel() const { return k_; }
  double sigma() const { return sigma_; }

  double Evaluate(Subset s) const {
    const int k = s.Size();
    if (k == 0) return 0.0;
    int idx[kMaxGroundSetSize];
    int t = 0;
    s.ForEachMember([&](int v) { idx[t++] = v; });
    thread_local std::vector<double> a;
    a.assign(static_cast<std::size_t>(k) * k, 0.0);
    const double noise = sigma_ * sigma_;
    for (int i = 0; i < k; ++i)
      for (int j = 0; j <= i; ++j)
        a[i * k + j] = k_(idx[i], idx[j]) + (i == j ? noise : 0.0);
    // In-place lower Cholesky.
    double logdet = 0.0;
    for (int j = 0; j < k; ++j) {
      double d = a[j * k + j];
      for (int p = 0; p < j; ++p) d -= a[j * k + p] * a[j * k + p];
      if (!(d > 0.0) || !std::isfinite(d))
        throw ModelError("log-det dpp: K_SS + sigma^2 I is not positive definite for S = " +
                         s.ToString(size()));
      const double ljj = std::sqrt(d);
      a[j * k + j] = ljj;
      logdet += std::log(ljj);
      for (int i = j + 1; i < k; ++i) {
        double x = a[i * k + j];
        for (int p = 0; p < j; ++p) x -= a[i * k + p] * a[j * k + p];
        a[i * k + j] = x / ljj;
      }
    }
    return 2.0 * logdet;
  }

 private:
  Matrix k_;
  double sigma_;
};

// F(S) = sum_{v in S} w_v + sum_j max_{i in S} c_ij.
class FlDiversity {
 public:
  FlDiversity(std::vector<double> w, Matrix c)
      : w_(std::move(w)), facility_(std::move(c)) {
    if (static_cast<int>(w_.size()) != facility_.size())
      throw ModelError("fl diversity: weight vector length must equal rows of C");
    for (double x : w_)
      if (!std::isfinite(x)) throw ModelError("fl diversity: non-finite weight");
  }

  int size() const { return facility_.size(); }
  const std::vector<double>& weights() const { return w_; }
  const Matrix& matrix() const { return facility_.matrix(); }

  double Evaluate(Subset s) const {
    double modular = 0.0;
    s.ForEachMember([&](int v) { modular += w_[v]; });
    return modular + facility_.Evaluate(s);
  }

 private:
  std::vector<double> w_;
  FacilityLocation facility_;
};

class ModularModel {
 public:
  explicit ModularModel(ModularFunction m) : m_(std::move(m)) {
    (void)GroundSet(m_.size());
    if (!std::isfinite(m_.offset)) throw ModelError("modular: non-finite offset");
    for (double x : m_.weights)
      if (!std::isfinite(x)) throw ModelError("modular: non-finite weight");
  }
  int size() const { return m_.size(); }
  const ModularFunction& function() const { return m_; }
  double Evaluate(Subset s) const { return m_.Evaluate(s); }

 private:
  ModularFunction m_;
};

// F given as a dense table indexed by the subset bitmask.
class ExplicitTable {
 public:
  ExplicitTable(int n, std::vector<double> values) : n_(n), values_(std::move(values)) {
    (void)GroundSet(n);
    if (n > 30) throw ModelError("explicit table: n too large for a dense table");
    if (values_.size() != (std::size_t{1} << n))
      throw ModelError("explicit table: expected 2^n = " +
                       std::to_string(std::size_t{1} << n) + " values, got " +
                       std::to_string(values_.size()));
    for (double x : values_)
      if (!std::isfinite(x)) throw ModelError("explicit table: non-finite value");
  }
  int size() const { return n_; }
  const std::vector<double>& values() const { return values_; }
  double Evaluate(Subset s) const { return values_[s.bits()]; }

 private:
  int n_;
  std::vector<double> values_;
};

// Tagged union of the supported model families. Immutable once built.
class Model {
 public:
  using Variant = std::variant<IsingComplete, FacilityLocation, LogDetDpp, FlDiversity,
                               ModularModel, ExplicitTable>;

  template <typename T>
    requires std::constructible_from<Variant, T>
  Model(T family) : family_(std::move(family)) {}  // NOLINT(google-explicit-constructor)

  int size() const {
    return std::visit([](const auto& f) { return f.size(); }, family_);
  }
  double Evaluate(Subset s) const {
    return std::visit([s](const auto& f) { return f.Evaluate(s); }, family_);
  }

  std::string_view kind() const {
    switch (family_.index()) {
      case 0: return "ising";
      case 1: return "facility_location";
      case 2: return "log_det_dpp";
      case 3: return "fl_diversity";
      case 4: return "modular";
      default: return "explicit_table";
    }
  }

  const Variant& family() const { return family_; }
  template <typename T>
  const T* get_if() const {
    return std::get_if<T>(&family_);
  }

 private:
  Variant family_;
};

// Evaluates F(A + v) for a growing set A. Facility-location families keep
// the running column maxima so each query costs O(L) instead of O(|A| L);
// everything else falls back to a full evaluation. Every query counts as one
// oracle call.
class IncrementalEvaluator {
 public:
  explicit IncrementalEvaluator(const Model& model) : model_(&model) {
    if (const auto* fl = model.get_if<FacilityLocation>()) {
      matrix_ = &fl->matrix();
    } else if (const auto* div = model.get_if<FlDiversity>()) {
      matrix_ = &div->matrix();
      modular_ = &div->weights();
    }
    if (matrix_ != nullptr) maxima_.assign(matrix_->cols, 0.0);
    value_ = model.Evaluate(current_);
    ++calls_;
  }

  Subset current() const { return current_; }
  double value() const { return value_; }
  long oracle_calls() const { return calls_; }

  double ValueWith(int v) {
    ++calls_;
    if (current_.Contains(v)) return value_;
    if (matrix_ == nullptr) return model_->Evaluate(current_.With(v));
    const double* row = &matrix_->data[static_cast<std::size_t>(v) * matrix_->cols];
    double total = modular_sum_ + (modular_ ? (*modular_)[v] : 0.0);
    if (current_.IsEmpty()) {
      for (int j = 0; j < matrix_->cols; ++j) total += row[j];
    } else {
      for (int j = 0; j < matrix_->cols; ++j) total += std::max(maxima_[j], row[j]);
    }
    return total;
  }

  // Commits v to A; `value` must be the result of ValueWith(v).
  void Add(int v, double value) {
    if (current_.Contains(v)) return;
    if (matrix_ != nullptr) {
      const double* row = &matrix_->data[static_cast<std::size_t>(v) * matrix_->cols];
      for (int j = 0; j < matrix_->cols; ++j)
        maxima_[j] = current_.IsEmpty() ? row[j] : std::max(maxima_[j], row[j]);
      if (modular_) modular_sum_ += (*modular_)[v];
    }
    current_.Insert(v);
    value_ = value;
  }

 private:
  const Model* model_;
  const Matrix* matrix_ = nullptr;
  const std::vector<double>* modular_ = nullptr;
  std::vector<double> maxima_;
  double modular_sum_ = 0.0;
  Subset current_;
  double value_ = 0.0;
  long calls_ = 0;
};

// Wraps a set function and counts Evaluate calls. Not thread-safe.
template <SetFunction F>
class CountingOracle {
 public:
  explicit CountingOracle(const F& f) : f_(&f) {}
  int size() const { return f_->size(); }
  double Evaluate(Subset s) const {
    ++calls_;
    return f_->Evaluate(s);
  }
  long calls() const { return calls_; }
  void reset() { calls_ = 0; }

 private:
  const F* f_;
  mutable long calls_ = 0;
};

}  // namespace mixmc

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

#include <stdexcept>
#include <string>

namespace mixmc {

// Raised when a model cannot be evaluated (e.g. a kernel submatrix that is
// not positive definite) or when model parameters are inconsistent.
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Precondition violations on operation arguments.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Exact operations refuse ground sets above the configured enumeration limit.
class LimitError : public DomainError {
 public:
  LimitError(int n, int limit)
      : DomainError("ground set size " + std::to_string(n) +
                    " exceeds the enumeration limit " + std::to_string(limit)),
        n_(n),
        limit_(limit) {}
  int n() const { return n_; }
  int limit() const { return limit_; }

 private:
  int n_;
  int limit_;
};

// CSV / JSON ingestion failures. Rows and columns are 1-based.
class ParseError : public std::runtime_error {
 public:
  enum class Kind { kEmptyFile, kRaggedRow, kNonNumeric, kIo, kSchema };

  ParseError(Kind kind, std::string message, int row = 0, int column = 0)
      : std::runtime_error(std::move(message)),
        kind_(kind),
        row_(row),
        column_(column) {}

  Kind kind() const { return kind_; }
  int row() const { return row_; }
  int column() const { return column_; }

 private:
  Kind kind_;
  int row_;
  int column_;
};

}  // namespace mixmc

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
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "mixmc/errors.hpp"
#include "mixmc/logmodular.hpp"
#include "mixmc/models.hpp"
#include "mixmc/random.hpp"
#include "mixmc/trace.hpp"

namespace mixmc {

using Json = nlohmann::json;

namespace internal {

inline std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

inline bool ParseDouble(std::string_view cell, double& out) {
  cell = Trim(cell);
  if (cell.empty()) return false;
  if (cell.front() == '+') cell.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), out);
  return ec == std::errc() && ptr == cell.data() + cell.size() && std::isfinite(out);
}

inline std::vector<std::string_view> SplitCells(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(line.substr(start));
      break;
    }
    cells.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return cells;
}

}  // namespace internal

// Rectangular numeric CSV; a first row containing a non-numeric cell is taken
// as a header. Blank lines are skipped. Rows/columns in errors are 1-based
// file positions.
inline Matrix ParseMatrixCsv(std::string_view text) {
  std::vector<std::vector<double>> rows;
  int line_no = 0;
  int width = -1;
  bool first = true;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const std::string_view line = internal::Trim(text.substr(pos, nl - pos));
    pos = nl + 1;
    ++line_no;
    if (line.empty()) {
      if (nl == text.size()) break;
      continue;
    }
    const auto cells = internal::SplitCells(line);
    std::vector<double> values(cells.size());
    int bad_column = 0;
    for (std::size_t c = 0; c < cells.size(); ++c)
      if (!internal::ParseDouble(cells[c], values[c]) && bad_column == 0)
        bad_column = static_cast<int>(c) + 1;
    if (bad_column != 0) {
      if (first) {
        first = false;
        width = static_cast<int>(cells.size());
        continue;  // header
      }
      throw ParseError(ParseError::Kind::kNonNumeric,
                       "csv: non-numeric cell at row " + std::to_string(line_no) + ", column " +
                           std::to_string(bad_column),
                       line_no, bad_column);
    }
    first = false;
    if (width < 0) width = static_cast<int>(cells.size());
    if (static_cast<int>(cells.size()) != width)
      throw ParseError(ParseError::Kind::kRaggedRow,
                       "csv: ragged row " + std::to_string(line_no) + " (expected " +
                           std::to_string(width) + " cells, got " +
                           std::to_string(cells.size()) + ")",
                       line_no, 0);
    rows.push_back(std::move(values));
    if (nl == text.size()) break;
  }
  if (rows.empty()) throw ParseError(ParseError::Kind::kEmptyFile, "csv: no data rows");
  return Matrix::FromRows(rows);
}

inline std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(ParseError::Kind::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Matrix LoadMatrixCsv(const std::filesystem::path& path) {
  return ParseMatrixCsv(ReadFile(path));
}

inline void WriteMatrixCsv(const std::filesystem::path& path, const Matrix& m) {
  std::ofstream out(path);
  out << std::setprecision(17);
  for (int i = 0; i < m.rows; ++i) {
    for (int j = 0; j < m.cols; ++j) out << (j ? "," : "") << m(i, j);
    out << '\n';
  }
}

// Uniformly random row and column subsets (without replacement), kept in
// source order.
inline Matrix SubsampleMatrix(const Matrix& c, int rows, int cols, std::uint64_t seed) {
  if (rows < 1 || rows > c.rows || cols < 1 || cols > c.cols)
    throw DomainError("subsample: requested " + std::to_string(rows) + "x" +
                      std::to_string(cols) + " from a " + std::to_string(c.rows) + "x" +
                      std::to_string(c.cols) + " matrix");
  Rng rng = StreamEngine(seed, 0);
  auto pick = [&](int total, int k) {
    std::vector<int> idx(total);
    for (int i = 0; i < total; ++i) idx[i] = i;
    for (int i = 0; i < k; ++i) std::swap(idx[i], idx[i + UniformIndex(rng, total - i)]);
    idx.resize(k);
    std::sort(idx.begin(), idx.end());
    return idx;
  };
  const auto ri = pick(c.rows, rows);
  const auto ci = pick(c.cols, cols);
  Matrix out(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) out(i, j) = c(ri[i], ci[j]);
  return out;
}

enum class SyntheticKind { kWaterLike, kSensorLike, kGameLike };

inline SyntheticKind ParseSyntheticKind(std::string_view s) {
  if (s == "water-like") return SyntheticKind::kWaterLike;
  if (s == "sensor-like") return SyntheticKind::kSensorLike;
  if (s == "game-like") return SyntheticKind::kGameLike;
  throw DomainError("unknown synthetic kind '" + std::string(s) +
                    "' (expected water-like, sensor-like or game-like)");
}

// Generator knobs. All defaults are arbitrary desk-scale choices.
struct SynthesisOptions {
  // water-like: sensors and contamination events on the unit square; an
  // event is detected by sensors within `reach`, with benefit decaying in
  // distance and scaled by a heavy-tailed event impact.
  double reach = 0.25;
  double impact_scale = 0.5;
  // sensor-like: K = G G^T + eps I with G an n x rank Gaussian factor.
  int rank = 8;
  double jitter = 1e-3;
  double sigma = 1.0;
  // game-like: per-item utility ~ N(utility_mean, 0.5), benefits ~ Exp.
  double utility_mean = -2.0;
  double benefit_scale = 1.5;
};

inline Model SynthesizeModel(SyntheticKind kind, int n, int cols, std::uint64_t seed,
                             const SynthesisOptions& opt = {}) {
  (void)GroundSet(n);
  Rng rng = StreamEngine(seed, 1);
  std::normal_distribution<double> normal(0.0, 1.0);
  switch (kind) {
    case SyntheticKind::kWaterLike: {
      if (cols < 1) throw DomainError("water-like: L must be positive");
      std::vector<double> sx(n), sy(n);
      for (int i = 0; i < n; ++i) {
        sx[i] = Uniform01(rng);
        sy[i] = Uniform01(rng);
      }
      Matrix c(n, cols);
      for (int j = 0; j < cols; ++j) {
        const double ex = Uniform01(rng);
        const double ey = Uniform01(rng);
        const double impact = opt.impact_scale * std::exp(0.75 * normal(rng));
        for (int i = 0; i < n; ++i) {
          const double d = std::hypot(sx[i] - ex, sy[i] - ey);
          c(i, j) = d < opt.reach ? impact * (1.0 - d / opt.reach) : 0.0;
        }
      }
      return FacilityLocation(std::move(c));
    }
    case SyntheticKind::kSensorLike: {
      const int rank = std::max(1, opt.rank);
      Matrix g(n, rank);
      for (double& x : g.data) x = normal(rng) / std::sqrt(static_cast<double>(rank));
      Matrix k(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) {
          double dot = 0.0;
          for (int t = 0; t < rank; ++t) dot += g(i, t) * g(j, t);
          k(i, j) = dot + (i == j ? opt.jitter : 0.0);
          k(j, i) = k(i, j);
        }
      return LogDetDpp(std::move(k), opt.sigma);
    }
    case SyntheticKind::kGameLike: {
      if (cols < 1) throw DomainError("game-like: L must be positive");
      std::vector<double> w(n);
      for (double& x : w) x = opt.utility_mean + 0.5 * normal(rng);
      Matrix c(n, cols);
      for (double& x : c.data) x = -opt.benefit_scale * std::log1p(-Uniform01(rng));
      return FlDiversity(std::move(w), std::move(c));
    }
  }
  throw DomainError("unreachable synthetic kind");
}

// ---------------------------------------------------------------------------
// JSON. Models carry a "kind" discriminator; matrices are arrays of rows.

inline Json MatrixToJson(const Matrix& m) {
  Json rows = Json::array();
  for (int i = 0; i < m.rows; ++i) {
    Json row = Json::array();
    for (int j = 0; j < m.cols; ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Matrix MatrixFromJson(const Json& j, const std::string& field) {
  if (!j.is_array()) throw ParseError(ParseError::Kind::kSchema, field + ": expected an array of rows");
  std::vector<std::vector<double>> rows;
  for (const auto& r : j) {
    if (!r.is_array()) throw ParseError(ParseError::Kind::kSchema, field + ": rows must be arrays");
    rows.push_back(r.get<std::vector<double>>());
  }
  try {
    return Matrix::FromRows(rows);
  } catch (const DomainError& e) {
    throw ParseError(ParseError::Kind::kSchema, field + ": " + e.what());
  }
}

inline Json ModelToJson(const Model& model) {
  return std::visit(
      [](const auto& f) -> Json {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, IsingComplete>) {
          return {{"kind", "ising"}, {"n", f.size()}, {"beta", f.beta()}};
        } else if constexpr (std::is_same_v<T, FacilityLocation>) {
          return {{"kind", "facility_location"}, {"C", MatrixToJson(f.matrix())}};
        } else if constexpr (std::is_same_v<T, LogDetDpp>) {
          return {{"kind", "log_det_dpp"}, {"K", MatrixToJson(f.kernel())}, {"sigma", f.sigma()}};
        } else if constexpr (std::is_same_v<T, FlDiversity>) {
          return {{"kind", "fl_diversity"}, {"w", f.weights()}, {"C", MatrixToJson(f.matrix())}};
        } else if constexpr (std::is_same_v<T, ModularModel>) {
          return {{"kind", "modular"},
                  {"offset", f.function().offset},
                  {"weights", f.function().weights}};
        } else {
          return {{"kind", "explicit_table"}, {"n", f.size()}, {"values", f.values()}};
        }
      },
      model.family());
}

// `base_dir` resolves relative "csv" paths.
inline Model ModelFromJson(const Json& j, const std::filesystem::path& base_dir = {}) {
  auto require = [&](const char* key) -> const Json& {
    if (!j.contains(key))
      throw ParseError(ParseError::Kind::kSchema, std::string("model.") + key + ": missing");
    return j.at(key);
  };
  auto matrix = [&](const char* key) -> Matrix {
    if (j.contains(key)) return MatrixFromJson(j.at(key), std::string("model.") + key);
    if (j.contains("csv")) {
      std::filesystem::path p = j.at("csv").get<std::string>();
      if (p.is_relative()) p = base_dir / p;
      return LoadMatrixCsv(p);
    }
    throw ParseError(ParseError::Kind::kSchema,
                     std::string("model.") + key + ": missing (or give \"csv\")");
  };
  const std::string kind = require("kind").get<std::string>();
  try {
    if (kind == "ising") {
      const int n = require("n").get<int>();
      return j.contains("beta") ? IsingComplete(n, j.at("beta").get<double>())
                                : IsingComplete::Critical(n);
    }
    if (kind == "facility_location") return FacilityLocation(matrix("C"));
    if (kind == "log_det_dpp")
      return LogDetDpp(matrix("K"), j.value("sigma", SynthesisOptions{}.sigma));
    if (kind == "fl_diversity")
      return FlDiversity(require("w").get<std::vector<double>>(), matrix("C"));
    if (kind == "modular")
      return ModularModel(
          ModularFunction(require("weights").get<std::vector<double>>(), j.value("offset", 0.0)));
    if (kind == "explicit_table")
      return ExplicitTable(require("n").get<int>(), require("values").get<std::vector<double>>());
    if (kind == "synthetic") {
      SynthesisOptions opt;
      opt.sigma = j.value("sigma", opt.sigma);
      opt.rank = j.value("rank", opt.rank);
      return SynthesizeModel(ParseSyntheticKind(require("family").get<std::string>()),
                             require("n").get<int>(), j.value("L", 1),
                             j.value("seed", std::uint64_t{0}), opt);
    }
  } catch (const Json::exception& e) {
    throw ParseError(ParseError::Kind::kSchema, "model (" + kind + "): " + e.what());
  }
  throw ParseError(ParseError::Kind::kSchema, "model.kind: unknown kind '" + kind + "'");
}

inline Json MixtureToJson(const MixtureProposal& q) {
  Json comps = Json::array();
  for (int i = 0; i < q.num_components(); ++i)
    comps.push_back({{"log_w", q.log_weight(i)}, {"weights", q.component(i).weights}});
  return {{"n", q.size()}, {"components", std::move(comps)}};
}

inline MixtureProposal MixtureFromJson(const Json& j) {
  if (!j.contains("components") || !j.at("components").is_array())
    throw ParseError(ParseError::Kind::kSchema, "mixture.components: missing");
  std::vector<ModularFunction> comps;
  std::vector<double> log_w;
  try {
    for (const auto& c : j.at("components")) {
      comps.emplace_back(c.at("weights").get<std::vector<double>>());
      log_w.push_back(c.at("log_w").get<double>());
    }
  } catch (const Json::exception& e) {
    throw ParseError(ParseError::Kind::kSchema, std::string("mixture: ") + e.what());
  }
  return MixtureProposal(std::move(comps), std::move(log_w));
}

// CSV columns: chain,step,wallclock_ns,bit_0,...,bit_{n-1}.
inline void WriteTraceCsv(std::ostream& out, const Trace& trace, bool with_wallclock = true) {
  out << "chain,step,wallclock_ns";
  for (int v = 0; v < trace.n; ++v) out << ",bit_" << v;
  out << '\n';
  std::string row;
  for (int c = 0; c < trace.chains; ++c)
    for (int t = 0; t < trace.recorded(); ++t) {
      row.clear();
      row += std::to_string(c);
      row += ',';
      row += std::to_string(trace.steps[t]);
      row += ',';
      row += with_wallclock ? std::to_string(trace.wallclock(c, t)) : std::string("0");
      const Subset s = trace.state(c, t);
      for (int v = 0; v < trace.n; ++v) {
        row += ',';
        row += s.Contains(v) ? '1' : '0';
      }
      row += '\n';
      out << row;
    }
}

inline Trace ReadTraceCsv(std::string_view text) {
  Trace trace;
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line)) throw ParseError(ParseError::Kind::kEmptyFile, "trace: empty");
  const auto header = internal::SplitCells(line);
  trace.n = static_cast<int>(header.size()) - 3;
  if (trace.n < 1) throw ParseError(ParseError::Kind::kSchema, "trace: bad header");
  int row = 1;
  int last_chain = -1;
  while (std::getline(in, line)) {
    ++row;
    if (internal::Trim(line).empty()) continue;
    const auto cells = internal::SplitCells(line);
    if (static_cast<int>(cells.size()) != trace.n + 3)
      throw ParseError(ParseError::Kind::kRaggedRow, "trace: ragged row " + std::to_string(row), row);
    const int chain = std::stoi(std::string(cells[0]));
    const long step = std::stol(std::string(cells[1]));
    if (chain != last_chain) {
      last_chain = chain;
      ++trace.chains;
    }
    if (trace.chains == 1) trace.steps.push_back(step);
    Subset s;
    for (int v = 0; v < trace.n; ++v)
      if (internal::Trim(cells[3 + v]) == "1") s.Insert(v);
    trace.states.push_back(s);
    trace.wallclock_ns.push_back(std::stoll(std::string(cells[2])));
  }
  if (trace.states.size() != trace.steps.size() * static_cast<std::size_t>(trace.chains))
    throw ParseError(ParseError::Kind::kSchema, "trace: chains have unequal lengths");
  return trace;
}

// 64-bit FNV-1a, used for manifest content hashes.
inline std::uint64_t Fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::string HexDigest(std::uint64_t h) {
  std::ostringstream ss;
  ss << std::hex << std::setw(16) << std::setfill('0') << h;
  return ss.str();
}

}  // namespace mixmc

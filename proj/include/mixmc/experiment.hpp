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

// Config-driven experiment runner behind the `mixmc` command line tool:
// mixture construction, multi-chain sampling with PSRF curves, exact
// verification reports and step-cost benchmarks.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "mixmc/chains.hpp"
#include "mixmc/diagnostics.hpp"
#include "mixmc/errors.hpp"
#include "mixmc/exact.hpp"
#include "mixmc/io.hpp"
#include "mixmc/logmodular.hpp"
#include "mixmc/models.hpp"
#include "mixmc/semigrad.hpp"

namespace mixmc {

inline constexpr const char* kVersion = "0.3.0";

inline std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Where a sampler's proposal mixture comes from.
struct MixtureSource {
  enum class Kind { kNone, kCurieWeiss, kConstructed, kFile } kind = Kind::kNone;
  ConstructionConfig construction;
  std::filesystem::path file;
};

enum class ChainType { kGibbs, kM3, kCombined };

struct SamplerConfig {
  std::string label;
  ChainType type = ChainType::kGibbs;
  MixtureSource mixture;
  std::optional<double> alpha;  // falls back to the experiment alpha
};

enum class TracePolicy { kNone, kFirst, kAll };

struct ExperimentConfig {
  Json model_json;
  std::filesystem::path base_dir;
  std::vector<SamplerConfig> samplers;
  int chains = 20;
  long steps = 1000;
  long record_every = 1;
  int repetitions = 1;
  double burn_in = 0.0;
  double alpha = 0.5;
  std::optional<int> ell;
  std::uint64_t seed = 0;
  int workers = 1;
  int psrf_points = 200;
  bool split_psrf = false;
  TracePolicy traces = TracePolicy::kFirst;
  // Benchmark: mixture sizes and steps per measurement.
  std::vector<int> benchmark_r = {1, 20, 200};
  long benchmark_steps = 200000;
  // Exact: limits and the epsilon used for mixing-time bounds.
  ExactLimits limits;
  double epsilon = 0.25;
};

namespace internal {

[[noreturn]] inline void ConfigFail(const std::string& path, const std::string& what) {
  throw ParseError(ParseError::Kind::kSchema, path + ": " + what);
}

template <typename T>
T Field(const Json& j, const char* key, const std::string& path, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception&) {
    ConfigFail(path + "." + key, "wrong type");
  }
}

inline ConstructionConfig ParseConstruction(const Json& j, const std::string& path,
                                            std::uint64_t default_seed) {
  ConstructionConfig c;
  c.r = Field(j, "r", path, 1);
  if (c.r < 1) ConfigFail(path + ".r", "must be >= 1");
  const std::string mode = Field<std::string>(j, "mode", path, "greedy");
  if (mode == "greedy") {
    c.mode = PermutationMode::kGreedy;
  } else if (mode == "random") {
    c.mode = PermutationMode::kRandom;
  } else {
    ConfigFail(path + ".mode", "expected greedy or random");
  }
  const std::string kind = Field<std::string>(j, "kind", path, "sub");
  if (kind == "sub") {
    c.kind = SemigradientKind::kSub;
  } else if (kind == "super") {
    c.kind = SemigradientKind::kSuper;
  } else {
    ConfigFail(path + ".kind", "expected sub or super");
  }
  const std::string range = Field<std::string>(j, "k_range", path, "0..n");
  if (range == "0..n") {
    c.anchor_range = AnchorRange::kZeroToN;
  } else if (range == "1..n") {
    c.anchor_range = AnchorRange::kOneToN;
  } else {
    ConfigFail(path + ".k_range", "expected \"0..n\" or \"1..n\"");
  }
  c.forced_k = Field(j, "forced_k", path, std::vector<int>{});
  c.seed = Field(j, "seed", path, default_seed);
  return c;
}

}  // namespace internal

inline ExperimentConfig ParseExperimentConfig(const Json& j,
                                              const std::filesystem::path& base_dir = {}) {
  using internal::ConfigFail;
  using internal::Field;
  if (!j.is_object()) ConfigFail("config", "expected a JSON object");
  ExperimentConfig cfg;
  cfg.base_dir = base_dir;
  if (!j.contains("model")) ConfigFail("config.model", "missing");
  cfg.model_json = j.at("model");
  cfg.chains = Field(j, "chains", "config", cfg.chains);
  cfg.steps = Field(j, "steps", "config", cfg.steps);
  cfg.record_every = Field(j, "record_every", "config", cfg.record_every);
  cfg.repetitions = Field(j, "repetitions", "config", cfg.repetitions);
  cfg.burn_in = Field(j, "burn_in", "config", cfg.burn_in);
  cfg.alpha = Field(j, "alpha", "config", cfg.alpha);
  cfg.seed = Field(j, "seed", "config", cfg.seed);
  cfg.workers = Field(j, "workers", "config", cfg.workers);
  cfg.psrf_points = Field(j, "psrf_points", "config", cfg.psrf_points);
  cfg.split_psrf = Field(j, "split_psrf", "config", cfg.split_psrf);
  cfg.benchmark_r = Field(j, "benchmark_r", "config", cfg.benchmark_r);
  cfg.benchmark_steps = Field(j, "benchmark_steps", "config", cfg.benchmark_steps);
  cfg.limits.enumeration = Field(j, "enumeration_limit", "config", cfg.limits.enumeration);
  cfg.limits.spectral = Field(j, "spectral_limit", "config", cfg.limits.spectral);
  cfg.epsilon = Field(j, "epsilon", "config", cfg.epsilon);
  if (j.contains("ell") && !j.at("ell").is_null()) cfg.ell = Field(j, "ell", "config", 0);
  const std::string traces = Field<std::string>(j, "traces", "config", "first");
  if (traces == "none") {
    cfg.traces = TracePolicy::kNone;
  } else if (traces == "first") {
    cfg.traces = TracePolicy::kFirst;
  } else if (traces == "all") {
    cfg.traces = TracePolicy::kAll;
  } else {
    ConfigFail("config.traces", "expected none, first or all");
  }

  if (cfg.chains < 1) ConfigFail("config.chains", "must be >= 1");
  if (cfg.steps < 0) ConfigFail("config.steps", "must be >= 0");
  if (cfg.record_every < 1) ConfigFail("config.record_every", "must be >= 1");
  if (cfg.repetitions < 1) ConfigFail("config.repetitions", "must be >= 1");
  if (!(cfg.burn_in >= 0.0 && cfg.burn_in < 1.0)) ConfigFail("config.burn_in", "must be in [0, 1)");
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) ConfigFail("config.alpha", "must be in (0, 1)");
  if (cfg.workers < 1) ConfigFail("config.workers", "must be >= 1");
  if (cfg.psrf_points < 1) ConfigFail("config.psrf_points", "must be >= 1");
  if (!(cfg.epsilon > 0.0 && cfg.epsilon < 1.0)) ConfigFail("config.epsilon", "must be in (0, 1)");
  for (int r : cfg.benchmark_r)
    if (r < 1) ConfigFail("config.benchmark_r", "entries must be >= 1");

  if (j.contains("samplers")) {
    const Json& list = j.at("samplers");
    if (!list.is_array()) ConfigFail("config.samplers", "expected an array");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string path = "config.samplers[" + std::to_string(i) + "]";
      const Json& s = list[i];
      SamplerConfig sc;
      const std::string type = Field<std::string>(s, "type", path, "gibbs");
      if (type == "gibbs") {
        sc.type = ChainType::kGibbs;
      } else if (type == "m3") {
        sc.type = ChainType::kM3;
      } else if (type == "combined") {
        sc.type = ChainType::kCombined;
      } else {
        ConfigFail(path + ".type", "expected gibbs, m3 or combined");
      }
      sc.label = Field<std::string>(s, "label", path, type);
      if (s.contains("alpha")) {
        sc.alpha = Field(s, "alpha", path, 0.5);
        if (!(*sc.alpha > 0.0 && *sc.alpha < 1.0)) ConfigFail(path + ".alpha", "must be in (0, 1)");
      }
      if (sc.type != ChainType::kGibbs) {
        if (!s.contains("mixture")) ConfigFail(path + ".mixture", "missing");
        const Json& m = s.at("mixture");
        if (m.is_string() && m.get<std::string>() == "curie-weiss") {
          sc.mixture.kind = MixtureSource::Kind::kCurieWeiss;
        } else if (m.is_object() && m.contains("file")) {
          sc.mixture.kind = MixtureSource::Kind::kFile;
          sc.mixture.file = m.at("file").get<std::string>();
          if (sc.mixture.file.is_relative()) sc.mixture.file = base_dir / sc.mixture.file;
        } else if (m.is_object()) {
          sc.mixture.kind = MixtureSource::Kind::kConstructed;
          sc.mixture.construction = internal::ParseConstruction(m, path + ".mixture", cfg.seed);
        } else {
          ConfigFail(path + ".mixture", "expected \"curie-weiss\", {\"file\": ...} or a construction");
        }
      }
      for (const auto& prev : cfg.samplers)
        if (prev.label == sc.label) ConfigFail(path + ".label", "duplicate label " + sc.label);
      cfg.samplers.push_back(std::move(sc));
    }
  }
  return cfg;
}

// Built-in experiment presets: ising6/7/8, water-like, sensor-like, game-like.
inline Json PresetJson(const std::string& name) {
  auto ising = [](int n) {
    return Json{
        {"model", {{"kind", "ising"}, {"n", n}}},
        {"samplers",
         {{{"label", "gibbs"}, {"type", "gibbs"}},
          {{"label", "combo-f"}, {"type", "combined"}, {"mixture", "curie-weiss"}},
          {{"label", "combo-i"},
           {"type", "combined"},
           {"mixture", {{"r", 20}, {"mode", "greedy"}, {"kind", "super"}}}},
          {{"label", "combo-r"},
           {"type", "combined"},
           {"mixture", {{"r", 20}, {"mode", "random"}, {"kind", "super"}}}}}},
        {"chains", 20},
        {"steps", 20000},
        {"repetitions", 50},
        {"alpha", 0.5},
        {"psrf_points", 1000},
        {"seed", 1},
        {"traces", "first"},
        {"benchmark_r", {1, 20, 200}}};
  };
  auto submodular = [](Json model, int steps, int reps) {
    return Json{
        {"model", std::move(model)},
        {"samplers",
         {{{"label", "gibbs"}, {"type", "gibbs"}},
          {{"label", "combo-i"},
           {"type", "combined"},
           {"mixture", {{"r", 200}, {"mode", "greedy"}, {"kind", "sub"}}}},
          {{"label", "combo-r"},
           {"type", "combined"},
           {"mixture", {{"r", 200}, {"mode", "random"}, {"kind", "sub"}}}},
          {{"label", "m3-only"},
           {"type", "m3"},
           {"mixture", {{"r", 200}, {"mode", "greedy"}, {"kind", "sub"}}}}}},
        {"chains", 20},
        {"steps", steps},
        {"repetitions", reps},
        {"alpha", 0.5},
        {"psrf_points", 200},
        {"seed", 1},
        {"traces", "first"},
        {"benchmark_r", {1, 20, 200}}};
  };
  if (name == "ising6") return ising(6);
  if (name == "ising7") return ising(7);
  if (name == "ising8") return ising(8);
  if (name == "water-like")
    return submodular(
        {{"kind", "synthetic"}, {"family", "water-like"}, {"n", 50}, {"L", 500}, {"seed", 7}},
        3000, 10);
  if (name == "sensor-like")
    return submodular({{"kind", "synthetic"}, {"family", "sensor-like"}, {"n", 46}, {"seed", 7}},
                      3000, 10);
  if (name == "game-like") {
    Json j = submodular(
        {{"kind", "synthetic"}, {"family", "game-like"}, {"n", 48}, {"L", 10}, {"seed", 7}}, 3000,
        10);
    j["ell"] = 5;
    return j;
  }
  throw ParseError(ParseError::Kind::kSchema,
                   "unknown preset '" + name +
                       "' (ising6, ising7, ising8, water-like, sensor-like, game-like)");
}

inline std::vector<std::string> PresetNames() {
  return {"ising6", "ising7", "ising8", "water-like", "sensor-like", "game-like"};
}

// ---------------------------------------------------------------------------
// Mixture resolution.

struct ResolvedMixture {
  MixturePtr mixture;
  std::vector<ComponentRecord> log;  // empty unless constructed
};

inline ResolvedMixture ResolveMixture(const Model& model, const MixtureSource& src) {
  switch (src.kind) {
    case MixtureSource::Kind::kNone:
      return {};
    case MixtureSource::Kind::kCurieWeiss: {
      const auto* ising = model.get_if<IsingComplete>();
      if (ising == nullptr)
        throw DomainError("the curie-weiss mixture requires an ising model");
      return {std::make_shared<const MixtureProposal>(CurieWeissMixture(*ising)), {}};
    }
    case MixtureSource::Kind::kFile: {
      auto q = MixtureFromJson(Json::parse(ReadFile(src.file)));
      if (q.size() != model.size()) throw DomainError("mixture file ground set does not match model");
      return {std::make_shared<const MixtureProposal>(std::move(q)), {}};
    }
    case MixtureSource::Kind::kConstructed: {
      Construction c = BuildMixture(model, src.construction);
      return {std::make_shared<const MixtureProposal>(std::move(c.mixture)), std::move(c.log)};
    }
  }
  return {};
}

inline Json ConstructionLogToJson(const std::vector<ComponentRecord>& log, int n) {
  Json out = Json::array();
  for (const auto& rec : log)
    out.push_back({{"sigma", rec.sigma},
                   {"k", rec.k},
                   {"anchor", rec.anchor.ToString(n)},
                   {"oracle_calls", rec.oracle_calls}});
  return out;
}

inline SamplerSpec MakeSamplerSpec(const SamplerConfig& sc, const MixturePtr& q, double alpha,
                                   std::optional<int> ell) {
  const double a = sc.alpha.value_or(alpha);
  switch (sc.type) {
    case ChainType::kGibbs:
      if (ell) return GibbsSwapSpec{*ell};
      return GibbsSpec{};
    case ChainType::kM3:
      if (ell) return M3FixedSizeSpec{q, *ell};
      return M3Spec{q};
    case ChainType::kCombined:
      if (ell) return CombinedFixedSizeSpec{q, a, *ell};
      return CombinedSpec{q, a};
  }
  return GibbsSpec{};
}

// ---------------------------------------------------------------------------
// Sampling experiments.

struct SamplerOutcome {
  std::string label;
  std::vector<long> checkpoint_steps;
  // Per repetition PSRF aggregate (max over elements) at each checkpoint.
  std::vector<std::vector<double>> aggregate;
  std::vector<std::vector<double>> mean;  // mean over elements
  std::vector<std::vector<std::vector<double>>> per_element;  // [rep][checkpoint][v]
  // Per repetition median (over chains) cumulative wallclock at checkpoints.
  std::vector<std::vector<double>> wallclock_ns;

  // Pointwise average over repetitions.
  std::vector<double> MeanAggregate() const { return Average(aggregate); }
  std::vector<double> MeanWallclock() const { return Average(wallclock_ns); }

  static std::vector<double> Average(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) return {};
    std::vector<double> out(rows.front().size(), 0.0);
    for (const auto& r : rows)
      for (std::size_t i = 0; i < r.size(); ++i) out[i] += r[i];
    for (double& x : out) x /= static_cast<double>(rows.size());
    return out;
  }
};

struct ExperimentResult {
  int n = 0;
  std::vector<std::uint64_t> repetition_seeds;
  std::vector<SamplerOutcome> samplers;
  std::vector<std::filesystem::path> files;

  const SamplerOutcome& at(const std::string& label) const {
    for (const auto& s : samplers)
      if (s.label == label) return s;
    throw DomainError("no sampler labelled " + label);
  }
};

// First checkpoint from which the curve stays at or below the threshold;
// nullopt when it never settles.
inline std::optional<std::size_t> SettlingIndex(const std::vector<double>& curve, double threshold) {
  std::optional<std::size_t> idx;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    if (curve[i] <= threshold) {
      if (!idx) idx = i;
    } else {
      idx.reset();
    }
  }
  return idx;
}

// About `points` evenly spaced prefix lengths, always ending at `recorded`,
// skipping prefixes with fewer than 4 post-burn-in samples.
inline std::vector<int> PsrfCheckpoints(int recorded, int points, double burn_in = 0.0) {
  auto usable = [&](int c) { return c - static_cast<int>(std::floor(burn_in * c)) >= 4; };
  std::vector<int> cps;
  const int stride = std::max(1, recorded / std::max(1, points));
  for (int c = stride; c <= recorded; c += stride)
    if (usable(c)) cps.push_back(c);
  if (usable(recorded) && (cps.empty() || cps.back() != recorded)) cps.push_back(recorded);
  return cps;
}

namespace internal {

inline std::string FormatDouble(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  std::ostringstream ss;
  ss << std::setprecision(10) << x;
  return ss.str();
}

inline void WriteText(const std::filesystem::path& path, const std::string& text,
                      std::vector<std::filesystem::path>& files) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  files.push_back(path);
}

}  // namespace internal

// Runs every sampler for every repetition. With `out_dir` set, writes
// mixtures, construction logs, traces (per policy) and the PSRF CSVs.
inline ExperimentResult RunExperiment(const ExperimentConfig& cfg,
                                      const std::optional<std::filesystem::path>& out_dir = {}) {
  const Model model = ModelFromJson(cfg.model_json, cfg.base_dir);
  const int n = model.size();
  if (cfg.ell && (*cfg.ell < 0 || *cfg.ell > n)) throw DomainError("config.ell: must lie in [0, n]");
  if (cfg.samplers.empty()) throw DomainError("config.samplers: at least one sampler required");
  const long recorded = cfg.steps / cfg.record_every + 1;

  ExperimentResult result;
  result.n = n;
  for (int rep = 0; rep < cfg.repetitions; ++rep)
    result.repetition_seeds.push_back(SplitMix64(cfg.seed ^ SplitMix64(static_cast<std::uint64_t>(rep))));
  if (out_dir) std::filesystem::create_directories(*out_dir);

  // Too short or single-chain runs still produce traces, with empty curves.
  const auto checkpoints = cfg.chains >= 2
                               ? PsrfCheckpoints(static_cast<int>(recorded), cfg.psrf_points, cfg.burn_in)
                               : std::vector<int>{};
  PsrfOptions popt;
  popt.burn_in_fraction = cfg.burn_in;
  popt.split_chains = cfg.split_psrf;

  for (const auto& sc : cfg.samplers) {
    const ResolvedMixture mix = ResolveMixture(model, sc.mixture);
    if (out_dir && mix.mixture) {
      internal::WriteText(*out_dir / ("mixture_" + sc.label + ".json"),
                          MixtureToJson(*mix.mixture).dump(1) + "\n", result.files);
      if (!mix.log.empty())
        internal::WriteText(*out_dir / ("construction_log_" + sc.label + ".json"),
                            ConstructionLogToJson(mix.log, n).dump(1) + "\n", result.files);
    }
    const SamplerSpec spec = MakeSamplerSpec(sc, mix.mixture, cfg.alpha, cfg.ell);

    SamplerOutcome outcome;
    outcome.label = sc.label;
    for (int c : checkpoints) outcome.checkpoint_steps.push_back(static_cast<long>(c - 1) * cfg.record_every);

    for (int rep = 0; rep < cfg.repetitions; ++rep) {
      RunOptions ro;
      ro.chains = cfg.chains;
      ro.steps = cfg.steps;
      ro.record_every = cfg.record_every;
      ro.seed = result.repetition_seeds[rep];
      ro.workers = cfg.workers;
      const Trace trace = RunChains(model, spec, ro);
      const auto curve =
          checkpoints.empty() ? std::vector<PsrfReport>{} : PsrfCurve(trace, checkpoints, popt);
      std::vector<double> agg, mean, wall;
      std::vector<std::vector<double>> elems;
      std::vector<std::int64_t> times(trace.chains);
      for (std::size_t i = 0; i < curve.size(); ++i) {
        agg.push_back(curve[i].aggregate);
        mean.push_back(curve[i].mean);
        elems.push_back(curve[i].per_element);
        for (int c = 0; c < trace.chains; ++c) times[c] = trace.wallclock(c, checkpoints[i] - 1);
        std::nth_element(times.begin(), times.begin() + times.size() / 2, times.end());
        wall.push_back(static_cast<double>(times[times.size() / 2]));
      }
      outcome.aggregate.push_back(std::move(agg));
      outcome.mean.push_back(std::move(mean));
      outcome.per_element.push_back(std::move(elems));
      outcome.wallclock_ns.push_back(std::move(wall));
      if (out_dir && (cfg.traces == TracePolicy::kAll ||
                      (cfg.traces == TracePolicy::kFirst && rep == 0))) {
        std::ostringstream ss;
        WriteTraceCsv(ss, trace);
        internal::WriteText(*out_dir / ("trace_" + sc.label + "_rep" + std::to_string(rep) + ".csv"),
                            ss.str(), result.files);
      }
    }

    if (out_dir) {
      const auto agg = outcome.MeanAggregate();
      const auto mean = SamplerOutcome::Average(outcome.mean);
      const auto wall = outcome.MeanWallclock();
      std::ostringstream by_iter;
      by_iter << "checkpoint,psrf_aggregate,psrf_mean";
      for (int v = 0; v < n; ++v) by_iter << ",psrf_elem_" << v;
      by_iter << '\n';
      for (std::size_t i = 0; i < checkpoints.size(); ++i) {
        by_iter << outcome.checkpoint_steps[i] << ',' << internal::FormatDouble(agg[i]) << ','
                << internal::FormatDouble(mean[i]);
        for (int v = 0; v < n; ++v) {
          double s = 0.0;
          for (const auto& rep : outcome.per_element) s += rep[i][v];
          by_iter << ',' << internal::FormatDouble(s / outcome.per_element.size());
        }
        by_iter << '\n';
      }
      internal::WriteText(*out_dir / ("psrf_" + sc.label + ".csv"), by_iter.str(), result.files);
      std::ostringstream by_time;
      by_time << "wallclock_ns,psrf_aggregate,psrf_mean\n";
      for (std::size_t i = 0; i < checkpoints.size(); ++i)
        by_time << internal::FormatDouble(wall[i]) << ',' << internal::FormatDouble(agg[i]) << ','
                << internal::FormatDouble(mean[i]) << '\n';
      internal::WriteText(*out_dir / ("psrf_wallclock_" + sc.label + ".csv"), by_time.str(),
                          result.files);
    }
    result.samplers.push_back(std::move(outcome));
  }
  return result;
}

// Writes manifest.json listing every file with its FNV-1a hash.
inline void WriteManifest(const std::filesystem::path& out_dir, const std::string& command,
                          const ExperimentConfig& cfg, const std::vector<std::filesystem::path>& files,
                          const std::vector<std::uint64_t>& repetition_seeds, bool complete,
                          const std::string& error = {}) {
  Json entries = Json::array();
  for (const auto& f : files) {
    if (!std::filesystem::exists(f)) continue;
    entries.push_back({{"path", std::filesystem::relative(f, out_dir).string()},
                       {"fnv1a64", HexDigest(Fnv1a64(ReadFile(f)))}});
  }
  Json m = {{"tool", "mixmc"},
            {"version", kVersion},
            {"command", command},
            {"status", complete ? "complete" : "incomplete"},
            {"seed", cfg.seed},
            {"repetition_seeds", repetition_seeds},
            {"files", std::move(entries)}};
  if (!error.empty()) m["error"] = error;
  std::ofstream(out_dir / "manifest.json") << m.dump(1) << "\n";
}

// ---------------------------------------------------------------------------
// Exact verification report.

struct ChainReport {
  std::string name;
  double gap = 0.0;
  double lambda2 = 0.0;
  double lazy_gap = 0.0;
  double row_residual = 0.0;
  double detailed_balance = 0.0;
  double stationarity = 0.0;
  MixingTimeBounds lazy_bounds;
  // Cardinality split (|S| < n/2 vs > n/2).
  double projection_gap = 0.0;
  std::vector<double> restriction_gaps;
  double max_leakage = 0.0;
  double decomposition_bound = 0.0;
  double bottleneck_omega0 = 0.0;
};

struct ExactReport {
  int n = 0;
  double log_z = 0.0;
  double pi_min = 0.0;
  std::vector<double> marginals;
  double tv_pi_q = -1.0;  // -1 when no mixture
  std::vector<ChainReport> chains;
};

template <SetFunction F>
ChainReport AnalyzeChain(const F& model, const SamplerSpec& spec, const std::string& name,
                         const ExactLimits& limits, double epsilon) {
  ChainReport rep;
  rep.name = name;
  const TransitionMatrix tm = BuildTransitionMatrix(model, spec, limits);
  const auto pi = StationaryOn(model, tm.space);
  rep.row_residual = RowSumResidual(tm.p);
  rep.detailed_balance = DetailedBalanceResidual(tm.p, pi);
  rep.stationarity = StationarityResidual(tm.p, pi);
  const SpectralReport sr = SpectralGap(tm.p, pi);
  rep.gap = sr.gap;
  rep.lambda2 = sr.lambda2;
  // Lazy spectrum is (1 + lambda) / 2 so its gap is half the plain gap.
  rep.lazy_gap = 0.5 * sr.gap;
  const double pi_min = *std::min_element(pi.begin(), pi.end());
  if (rep.lazy_gap > 0.0) rep.lazy_bounds = MixingTimeBoundsFor(std::min(1.0, rep.lazy_gap), pi_min, epsilon);

  const auto labels = CardinalitySplitLabels(tm.space);
  const auto blocks = BlocksFromLabels(labels);
  if (blocks.size() == 2 && !blocks[0].empty() && !blocks[1].empty()) {
    const ProjectedChain proj = ProjectChain(tm.p, pi, labels);
    rep.projection_gap = SpectralGap(proj.p, proj.pi).gap;
    for (const auto& b : blocks)
      rep.restriction_gaps.push_back(
          SpectralGap(RestrictChain(tm.p, b), RestrictDistribution(pi, b)).gap);
    rep.max_leakage = MaxLeakage(tm.p, labels);
    rep.decomposition_bound = DecompositionGapBound(
        rep.projection_gap,
        *std::min_element(rep.restriction_gaps.begin(), rep.restriction_gaps.end()),
        rep.max_leakage);
    rep.bottleneck_omega0 = BottleneckRatio(tm.p, pi, blocks[0]);
  }
  return rep;
}

// Uses the first sampler with a mixture as q; without one, only Gibbs.
inline ExactReport RunExact(const ExperimentConfig& cfg) {
  const Model model = ModelFromJson(cfg.model_json, cfg.base_dir);
  const int n = model.size();
  RequireEnumerable(n, cfg.limits.enumeration);
  RequireEnumerable(n, cfg.limits.spectral);
  ExactReport rep;
  rep.n = n;
  const DistributionTable table = EnumerateDistribution(model, cfg.limits);
  rep.log_z = table.log_z;
  rep.pi_min = table.pi_min();
  rep.marginals = ExactMarginals(table);

  MixturePtr q;
  for (const auto& sc : cfg.samplers)
    if (sc.mixture.kind != MixtureSource::Kind::kNone) {
      q = ResolveMixture(model, sc.mixture).mixture;
      break;
    }
  rep.chains.push_back(AnalyzeChain(model, GibbsSpec{}, "gibbs", cfg.limits, cfg.epsilon));
  if (q) {
    rep.tv_pi_q = TvDistance(table.probs, MixtureTable(*q, cfg.limits));
    rep.chains.push_back(AnalyzeChain(model, M3Spec{q}, "m3", cfg.limits, cfg.epsilon));
    rep.chains.push_back(
        AnalyzeChain(model, CombinedSpec{q, cfg.alpha}, "combined", cfg.limits, cfg.epsilon));
  }
  return rep;
}

inline Json ExactReportToJson(const ExactReport& r) {
  Json chains = Json::array();
  for (const auto& c : r.chains)
    chains.push_back({{"sampler", c.name},
                      {"spectral_gap", c.gap},
                      {"lambda2", c.lambda2},
                      {"lazy_spectral_gap", c.lazy_gap},
                      {"row_sum_residual", c.row_residual},
                      {"detailed_balance_residual", c.detailed_balance},
                      {"stationarity_residual", c.stationarity},
                      {"lazy_mixing_time_lower", c.lazy_bounds.lower},
                      {"lazy_mixing_time_upper", c.lazy_bounds.upper},
                      {"projection_gap", c.projection_gap},
                      {"restriction_gaps", c.restriction_gaps},
                      {"max_leakage", c.max_leakage},
                      {"decomposition_bound", c.decomposition_bound},
                      {"bottleneck_ratio_omega0", c.bottleneck_omega0}});
  Json out = {{"n", r.n},
              {"log_z", r.log_z},
              {"pi_min", r.pi_min},
              {"marginals", r.marginals},
              {"chains", std::move(chains)}};
  if (r.tv_pi_q >= 0.0) out["tv_pi_q"] = r.tv_pi_q;
  return out;
}

// ---------------------------------------------------------------------------
// Step-cost benchmark.

struct BenchmarkRow {
  std::string sampler;
  int r = 0;
  int n = 0;
  long steps = 0;
  double ns_per_step = 0.0;
  double oracle_calls_per_step = 0.0;
};

template <SetFunction F>
BenchmarkRow TimeSampler(const F& model, const SamplerSpec& spec, long steps, std::uint64_t seed) {
  const CountingOracle<F> counted(model);
  const Kernel<CountingOracle<F>> kernel(counted, spec);
  Rng rng = StreamEngine(seed, 0);
  ChainState st = MakeChainState(counted, kernel.InitialState(rng));
  // Warm up caches.
  for (long i = 0; i < std::min(steps / 10, 10000L); ++i) kernel.Step(st, rng);
  const long calls_before = counted.calls();
  const auto start = std::chrono::steady_clock::now();
  for (long i = 0; i < steps; ++i) kernel.Step(st, rng);
  const auto elapsed = std::chrono::steady_clock::now() - start;
  BenchmarkRow row;
  row.sampler = SamplerName(spec);
  row.n = model.size();
  row.steps = steps;
  row.ns_per_step =
      static_cast<double>(std::chrono::duration_cast<std::chrono::nanoseconds>(elapsed).count()) /
      static_cast<double>(std::max(1L, steps));
  row.oracle_calls_per_step =
      static_cast<double>(counted.calls() - calls_before) / static_cast<double>(std::max(1L, steps));
  if (const auto* q = SpecMixture(spec)) row.r = q->num_components();
  return row;
}

// Gibbs once per r (it ignores the mixture) and M3 per r, with mixtures from
// random-permutation subgradients.
inline std::vector<BenchmarkRow> RunBenchmark(const ExperimentConfig& cfg) {
  const Model model = ModelFromJson(cfg.model_json, cfg.base_dir);
  std::vector<BenchmarkRow> rows;
  for (int r : cfg.benchmark_r) {
    ConstructionConfig cc;
    cc.r = r;
    cc.mode = PermutationMode::kRandom;
    cc.kind = SemigradientKind::kSub;
    cc.seed = cfg.seed;
    auto q = std::make_shared<const MixtureProposal>(BuildMixture(model, cc).mixture);
    BenchmarkRow g = TimeSampler(model, GibbsSpec{}, cfg.benchmark_steps, cfg.seed);
    g.r = r;
    rows.push_back(g);
    rows.push_back(TimeSampler(model, M3Spec{q}, cfg.benchmark_steps, cfg.seed));
  }
  return rows;
}

inline std::string BenchmarkCsv(const std::vector<BenchmarkRow>& rows) {
  std::ostringstream ss;
  ss << "sampler,r,n,steps,ns_per_step,oracle_calls_per_step\n";
  for (const auto& row : rows)
    ss << row.sampler << ',' << row.r << ',' << row.n << ',' << row.steps << ','
       << internal::FormatDouble(row.ns_per_step) << ','
       << internal::FormatDouble(row.oracle_calls_per_step) << '\n';
  return ss.str();
}

}  // namespace mixmc

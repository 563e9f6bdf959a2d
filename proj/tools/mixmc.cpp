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

// mixmc: command line front end for the experiment runner.
//
//   mixmc sample     --config exp.json --out results/
//   mixmc construct  --preset water-like --out mixtures/
//   mixmc exact      --preset ising7
//   mixmc benchmark  --preset water-like
//   mixmc synth-data --family water-like --n 50 --cols 500 --out data/
//
// Exit codes: 0 success, 1 invalid input or configuration, 2 runtime failure.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "mixmc/experiment.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

struct CommonFlags {
  std::string config;
  std::string preset;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<int> workers;
  std::optional<long> steps;
  std::optional<int> repetitions;
};

void AddCommon(CLI::App* cmd, CommonFlags& f, bool with_out = true) {
  auto* cfg = cmd->add_option("--config", f.config, "experiment config (JSON)")->check(CLI::ExistingFile);
  auto* pre = cmd->add_option("--preset", f.preset,
                              "built-in config: ising6, ising7, ising8, water-like, sensor-like, game-like");
  cfg->excludes(pre);
  cmd->add_option("--seed", f.seed, "override the config seed");
  if (with_out) cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--workers", f.workers, "worker threads")->check(CLI::PositiveNumber);
}

mixmc::ExperimentConfig LoadConfig(const CommonFlags& f) {
  mixmc::Json j;
  fs::path base;
  if (!f.config.empty()) {
    try {
      j = mixmc::Json::parse(mixmc::ReadFile(f.config));
    } catch (const mixmc::Json::parse_error& e) {
      throw mixmc::ParseError(mixmc::ParseError::Kind::kSchema,
                              f.config + ": invalid JSON: " + e.what());
    }
    base = fs::path(f.config).parent_path();
  } else if (!f.preset.empty()) {
    j = mixmc::PresetJson(f.preset);
  } else {
    throw mixmc::ParseError(mixmc::ParseError::Kind::kSchema, "one of --config or --preset is required");
  }
  if (f.seed) j["seed"] = *f.seed;
  if (f.workers) j["workers"] = *f.workers;
  if (f.steps) j["steps"] = *f.steps;
  if (f.repetitions) j["repetitions"] = *f.repetitions;
  return mixmc::ParseExperimentConfig(j, base);
}

fs::path OutDir(const CommonFlags& f) {
  const fs::path out = f.out.empty() ? fs::path("mixmc-out") : fs::path(f.out);
  fs::create_directories(out);
  return out;
}

int CmdSample(const CommonFlags& f) {
  const auto cfg = LoadConfig(f);
  const fs::path out = OutDir(f);
  try {
    const auto result = mixmc::RunExperiment(cfg, out);
    mixmc::WriteManifest(out, "sample", cfg, result.files, result.repetition_seeds, true);
    for (const auto& s : result.samplers) {
      const auto curve = s.MeanAggregate();
      std::cout << s.label << ": final aggregate psrf "
                << (curve.empty() ? std::string("n/a") : std::to_string(curve.back())) << '\n';
    }
  } catch (...) {
    std::vector<fs::path> partial;
    for (const auto& e : fs::directory_iterator(out))
      if (e.path().filename() != "manifest.json") partial.push_back(e.path());
    mixmc::WriteManifest(out, "sample", cfg, partial, {}, false, "run aborted");
    throw;
  }
  return kExitOk;
}

int CmdConstruct(const CommonFlags& f) {
  const auto cfg = LoadConfig(f);
  const fs::path out = OutDir(f);
  const mixmc::Model model = mixmc::ModelFromJson(cfg.model_json, cfg.base_dir);
  std::vector<fs::path> files;
  for (const auto& sc : cfg.samplers) {
    if (sc.mixture.kind == mixmc::MixtureSource::Kind::kNone) continue;
    const auto mix = mixmc::ResolveMixture(model, sc.mixture);
    const fs::path mpath = out / ("mixture_" + sc.label + ".json");
    std::ofstream(mpath) << mixmc::MixtureToJson(*mix.mixture).dump(1) << '\n';
    files.push_back(mpath);
    if (!mix.log.empty()) {
      const fs::path lpath = out / ("construction_log_" + sc.label + ".json");
      std::ofstream(lpath) << mixmc::ConstructionLogToJson(mix.log, model.size()).dump(1) << '\n';
      files.push_back(lpath);
    }
    std::cout << sc.label << ": " << mix.mixture->num_components() << " components\n";
  }
  mixmc::WriteManifest(out, "construct", cfg, files, {}, true);
  return kExitOk;
}

int CmdExact(const CommonFlags& f) {
  const auto cfg = LoadConfig(f);
  const mixmc::Json report = mixmc::ExactReportToJson(mixmc::RunExact(cfg));
  if (!f.out.empty()) {
    const fs::path out = OutDir(f);
    std::ofstream(out / "exact_report.json") << report.dump(1) << '\n';
    mixmc::WriteManifest(out, "exact", cfg, {out / "exact_report.json"}, {}, true);
  }
  std::cout << report.dump(1) << '\n';
  return kExitOk;
}

int CmdBenchmark(const CommonFlags& f, std::optional<long> bench_steps) {
  auto cfg = LoadConfig(f);
  if (bench_steps) cfg.benchmark_steps = *bench_steps;
  const auto rows = mixmc::RunBenchmark(cfg);
  const std::string csv = mixmc::BenchmarkCsv(rows);
  if (!f.out.empty()) {
    const fs::path out = OutDir(f);
    std::ofstream(out / "benchmark.csv") << csv;
    mixmc::WriteManifest(out, "benchmark", cfg, {out / "benchmark.csv"}, {}, true);
  }
  std::cout << csv;
  return kExitOk;
}

int CmdSynth(const std::string& family, int n, int cols, std::uint64_t seed, const std::string& out_flag) {
  const auto kind = mixmc::ParseSyntheticKind(family);
  const fs::path out = out_flag.empty() ? fs::path("mixmc-data") : fs::path(out_flag);
  fs::create_directories(out);
  const mixmc::Model model = mixmc::SynthesizeModel(kind, n, cols, seed);
  const mixmc::Json j = mixmc::ModelToJson(model);
  std::ofstream(out / "model.json") << j.dump(1) << '\n';
  std::vector<fs::path> files = {out / "model.json"};
  const mixmc::Matrix* m = nullptr;
  if (const auto* fl = model.get_if<mixmc::FacilityLocation>()) m = &fl->matrix();
  if (const auto* dpp = model.get_if<mixmc::LogDetDpp>()) m = &dpp->kernel();
  if (const auto* fd = model.get_if<mixmc::FlDiversity>()) m = &fd->matrix();
  if (m != nullptr) {
    mixmc::WriteMatrixCsv(out / "matrix.csv", *m);
    files.push_back(out / "matrix.csv");
  }
  mixmc::ExperimentConfig cfg;
  cfg.seed = seed;
  mixmc::WriteManifest(out, "synth-data", cfg, files, {}, true);
  std::cout << "wrote " << model.kind() << " model with n = " << model.size() << " to " << out << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mixmc: Gibbs, mixture-proposal Metropolis and combined samplers for set functions"};
  app.set_version_flag("--version", std::string(mixmc::kVersion));
  app.require_subcommand(1);

  CommonFlags sample_f, construct_f, exact_f, bench_f;
  auto* sample = app.add_subcommand("sample", "run chains and write traces and PSRF curves");
  AddCommon(sample, sample_f);
  sample->add_option("--steps", sample_f.steps, "override steps per chain")->check(CLI::NonNegativeNumber);
  sample->add_option("--repetitions", sample_f.repetitions, "override repetitions")
      ->check(CLI::PositiveNumber);

  auto* construct = app.add_subcommand("construct", "build and cache proposal mixtures");
  AddCommon(construct, construct_f);

  auto* exact = app.add_subcommand("exact", "exact enumeration and spectral report");
  AddCommon(exact, exact_f);

  std::optional<long> bench_steps;
  auto* bench = app.add_subcommand("benchmark", "per-step cost of Gibbs and M3 across mixture sizes");
  AddCommon(bench, bench_f);
  bench->add_option("--steps", bench_steps, "steps per measurement")->check(CLI::PositiveNumber);

  std::string family = "water-like";
  int synth_n = 50;
  int synth_cols = 500;
  std::uint64_t synth_seed = 0;
  std::string synth_out;
  auto* synth = app.add_subcommand("synth-data", "generate a synthetic model and its matrix CSV");
  synth->add_option("--family", family, "water-like, sensor-like or game-like");
  synth->add_option("--n", synth_n, "ground set size")->check(CLI::Range(1, 64));
  synth->add_option("--cols", synth_cols, "matrix columns (events, features)")->check(CLI::PositiveNumber);
  synth->add_option("--seed", synth_seed, "generator seed");
  synth->add_option("--out", synth_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (sample->parsed()) return CmdSample(sample_f);
    if (construct->parsed()) return CmdConstruct(construct_f);
    if (exact->parsed()) return CmdExact(exact_f);
    if (bench->parsed()) return CmdBenchmark(bench_f, bench_steps);
    if (synth->parsed()) return CmdSynth(family, synth_n, synth_cols, synth_seed, synth_out);
  } catch (const mixmc::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const mixmc::DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const mixmc::Json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

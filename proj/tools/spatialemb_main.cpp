// tools/spatialemb_main.cpp

// Copyright 2026 The SpatialEmb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "spatialemb/bench.hpp"
#include "spatialemb/config.hpp"
#include "spatialemb/embedding.hpp"
#include "spatialemb/fusion.hpp"
#include "spatialemb/scene.hpp"
#include "spatialemb/sef_io.hpp"
#include "spatialemb/selftest.hpp"
#include "spatialemb/spatial.hpp"
#include "spatialemb/stft.hpp"
#include "spatialemb/wav_io.hpp"

namespace fs = std::filesystem;
using namespace spatialemb;

namespace {

// One machine-readable line per failure:
//   error class=<ErrorClass> detail="<message>"
void PrintError(const std::string& cls, const std::string& what) {
  std::cerr << "error class=" << cls << " detail=\"" << what << "\""
            << std::endl;
}

// Writes through a temp file so config/validation failures never leave a
// partial output behind.
void AtomicWriteFeature(const std::string& path, const FeatureTensor& t) {
  const std::string tmp = path + ".tmp";
  WriteFeature(tmp, t);
  fs::rename(tmp, path);
}

void AtomicWriteWav(const std::string& path, const MultiChannelWave& w) {
  const std::string tmp = path + ".tmp";
  WriteWav(tmp, w);
  fs::rename(tmp, path);
}

struct ExtractJob {
  std::string mixture;
  std::string solo;
  std::string out;
  std::optional<int> solo_start;
};

void RunExtract(const ExtractJob& job, const RunConfig& cfg) {
  if (!fs::exists(job.solo))
    Throw(ErrorClass::kSoloMissing, "solo file not found: " + job.solo);
  MultiChannelWave mixture = ReadWav(job.mixture);
  MultiChannelWave solo = ReadWav(job.solo);
  Require(mixture.num_channels >= 2, ErrorClass::kNeedTwoChannels,
          "spatial features need at least two channels");
  Require(solo.num_channels == mixture.num_channels,
          ErrorClass::kShapeMismatch,
          "solo channel count differs from the mixture");

  Spectrogram mix_spec = ComputeStft(mixture);
  Spectrogram solo_spec = ComputeStft(solo);
  const int k = cfg.kernel_frames;
  const int start =
      job.solo_start.value_or(solo_spec.num_frames - k);  // last K frames
  SoloKernel kernel = ExtractKernel(solo_spec, start, k);
  FeatureTensor sf = AllPairsSpatialFeature(RirPhase(mix_spec, kernel));

  FeatureTensor spectral;
  if (cfg.feature == FeatureKind::kLps201) {
    spectral = LogPowerSpectrum(mix_spec);
  } else {
    FilterBank fb = MelFilterBank(mix_spec.num_bins, FeatureDim(cfg.feature),
                                  mix_spec.sample_rate_hz);
    spectral = LogFilterBank(mix_spec, fb);
    sf = ProjectSpatialFeature(sf, fb);
  }

  FusedInput fused;
  switch (cfg.topology) {
    case InputLayout::kFixed:
      fused = FuseFixed(spectral, sf);
      break;
    case InputLayout::kSqueezed: {
      FeatureTensor sq =
          SqueezeSpectral(spectral, cfg.squeeze_method, cfg.seed);
      fused = FuseSqueezed(sq, sf, mixture.num_channels);
      break;
    }
    case InputLayout::kExpanded:
      fused = ExpandSpatial(spectral, sf);
      break;
  }
  fused.data.CheckFinite("fused features");
  AtomicWriteFeature(job.out, fused.data);
}

RunConfig LoadRunConfig(const std::string& config_path) {
  RunConfig cfg;
  if (config_path.empty()) return cfg;
  for (const ConfigSection& sec : ParseKeyValueFile(config_path))
    if (sec.name == "run") cfg.LoadSection(sec);
  return cfg;
}

int CmdExtract(CLI::App* app, const RunConfig& cfg,
               const std::string& mixture, const std::string& solo,
               const std::string& out, std::optional<int> solo_start,
               const std::string& list_path, int jobs) {
  std::vector<ExtractJob> batch;
  if (!list_path.empty()) {
    std::ifstream is(list_path);
    if (!is) Throw(ErrorClass::kIoError, "cannot open: " + list_path);
    std::string line;
    while (std::getline(is, line)) {
      std::istringstream ss(line);
      ExtractJob job;
      if (!(ss >> job.mixture >> job.solo >> job.out)) continue;
      int start;
      if (ss >> start) job.solo_start = start;
      batch.push_back(job);
    }
    Require(!batch.empty(), ErrorClass::kBadConfig,
            "batch list has no jobs: " + list_path);
  } else {
    Require(!mixture.empty() && !solo.empty() && !out.empty(),
            ErrorClass::kBadConfig,
            "extract needs --mixture, --solo and --out (or --list)");
    batch.push_back(ExtractJob{mixture, solo, out, solo_start});
  }
  (void)app;

  std::mutex mu;
  std::vector<std::string> failures;
#pragma omp parallel for num_threads(jobs) schedule(dynamic)
  for (size_t i = 0; i < batch.size(); ++i) {
    try {
      RunExtract(batch[i], cfg);
    } catch (const Error& e) {
      std::lock_guard<std::mutex> lock(mu);
      failures.push_back(std::string(ErrorClassName(e.cls())) + "|" +
                         e.what());
    } catch (const std::exception& e) {
      std::lock_guard<std::mutex> lock(mu);
      failures.push_back(std::string("Internal|") + e.what());
    }
  }
  if (!failures.empty()) {
    auto bar = failures[0].find('|');
    PrintError(failures[0].substr(0, bar), failures[0].substr(bar + 1));
    return failures[0].substr(0, bar) == "Internal" ? 1 : 2;
  }
  return 0;
}

int CmdEmbed(const RunConfig& cfg, const std::string& in_path,
             const std::string& out_path, const std::string& compare_path,
             double compare_tol, const std::string& dump_weights) {
  FeatureTensor t = ReadFeature(in_path);
  t.Validate();

  FusedInput input;
  input.layout = cfg.topology;
  int mics = 0;
  switch (cfg.topology) {
    case InputLayout::kFixed:
      Require(t.Ndim() == 3, ErrorClass::kShapeMismatch,
              "fixed topology expects a 3-D tensor, got " + t.ShapeString());
      mics = int(t.Extent(0)) - 1;
      break;
    case InputLayout::kSqueezed:
      Require(t.Ndim() == 3 && t.Extent(0) == 2, ErrorClass::kShapeMismatch,
              "squeezed topology expects [2, T, Fd], got " + t.ShapeString());
      mics = 8;  // embedding is channel-count agnostic here
      break;
    case InputLayout::kExpanded:
      Require(t.Ndim() == 4 && t.Extent(1) == 2, ErrorClass::kShapeMismatch,
              "expanded topology expects [M, 2, T, Fd], got " +
                  t.ShapeString());
      mics = int(t.Extent(0));
      break;
  }
  input.num_mics = mics;
  input.data = std::move(t);

  EmbeddingSpec spec = cfg.BuildEmbeddingSpec(mics);
  Require(spec.feature_dim ==
              int(input.data.Extent(input.data.Ndim() - 1)),
          ErrorClass::kShapeMismatch,
          "feature config does not match the tensor's last extent");
  WeightStore weights = InitWeights(spec, cfg.seed);
  FeatureTensor out = EmbedForward(spec, weights, input);
  AtomicWriteFeature(out_path, out);
  if (!dump_weights.empty()) SaveWeights(dump_weights, weights);

  if (!compare_path.empty()) {
    FeatureTensor ref = ReadFeature(compare_path);
    Require(ref.dims == out.dims, ErrorClass::kShapeMismatch,
            "compare tensor shape differs: " + ref.ShapeString());
    double worst = 0.0;
    for (size_t i = 0; i < out.data.size(); ++i)
      worst = std::max(worst, std::abs(double(out.data[i]) - ref.data[i]));
    std::cout << "compare max_abs_diff=" << worst << " tol=" << compare_tol
              << "\n";
    if (worst > compare_tol) {
      PrintError("CompareMismatch",
                 "outputs differ by " + std::to_string(worst));
      return 1;
    }
  }
  return 0;
}

int CmdSimulate(const std::string& scene_path, const std::string& out_dir,
                const std::string& prefix) {
  SceneSpec scene = ParseSceneConfig(scene_path);
  SceneRender render = Synthesize(scene);
  fs::create_directories(out_dir);
  const fs::path base = fs::path(out_dir) / prefix;
  AtomicWriteWav(base.string() + "_mixture.wav", render.mixture);
  AtomicWriteWav(base.string() + "_solo.wav", render.target_solo);
  AtomicWriteFeature(base.string() + "_mask.sef", MaskToTensor(render.mask));
  std::cout << "wrote " << base.string() << "_{mixture,solo}.wav and _mask.sef"
            << std::endl;
  return 0;
}

struct BenchRow {
  std::string name;
  EmbeddingSpec spec;
};

std::vector<BenchRow> PresetRows(const std::string& preset) {
  std::vector<BenchRow> rows;
  auto make = [](Structure st, const char* version, FeatureKind feat,
                 InputLayout topo, ChannelFusion fus) {
    RunConfig cfg;
    cfg.structure = st;
    cfg.version = version;
    cfg.feature = feat;
    cfg.topology = topo;
    cfg.fusion = fus;
    return cfg.BuildEmbeddingSpec(8);
  };
  if (preset == "table1") {
    rows.push_back({"conv2d-S", make(Structure::kConv2d, "S",
                                     FeatureKind::kLps201,
                                     InputLayout::kFixed,
                                     ChannelFusion::kNone)});
    rows.push_back({"conv2d-L", make(Structure::kConv2d, "L",
                                     FeatureKind::kLps201,
                                     InputLayout::kFixed,
                                     ChannelFusion::kNone)});
    rows.push_back({"convnext-S", make(Structure::kConvNext, "S",
                                       FeatureKind::kLps201,
                                       InputLayout::kFixed,
                                       ChannelFusion::kNone)});
    rows.push_back({"convnext-L", make(Structure::kConvNext, "L",
                                       FeatureKind::kLps201,
                                       InputLayout::kFixed,
                                       ChannelFusion::kNone)});
    rows.push_back({"gru-S", make(Structure::kGruConv2d, "S",
                                  FeatureKind::kLps201, InputLayout::kFixed,
                                  ChannelFusion::kNone)});
    rows.push_back({"gru-L", make(Structure::kGruConv2d, "L",
                                  FeatureKind::kLps201, InputLayout::kFixed,
                                  ChannelFusion::kNone)});
    rows.push_back({"convnext-D", make(Structure::kConvNext, "D",
                                       FeatureKind::kLps201,
                                       InputLayout::kFixed,
                                       ChannelFusion::kNone)});
    rows.push_back({"convnext-LD", make(Structure::kConvNext, "L,D",
                                        FeatureKind::kLps201,
                                        InputLayout::kFixed,
                                        ChannelFusion::kNone)});
    rows.push_back({"gru-D", make(Structure::kGruConv2d, "D",
                                  FeatureKind::kLps201, InputLayout::kFixed,
                                  ChannelFusion::kNone)});
    rows.push_back({"gru-LD", make(Structure::kGruConv2d, "L,D",
                                   FeatureKind::kLps201, InputLayout::kFixed,
                                   ChannelFusion::kNone)});
    rows.push_back({"conv2d-S-fbank40", make(Structure::kConv2d, "S",
                                             FeatureKind::kLfb40,
                                             InputLayout::kFixed,
                                             ChannelFusion::kNone)});
    rows.push_back({"conv2d-S-fbank80", make(Structure::kConv2d, "S",
                                             FeatureKind::kLfb80,
                                             InputLayout::kFixed,
                                             ChannelFusion::kNone)});
    rows.push_back({"conv2d-sub", make(Structure::kConv2d, "sub",
                                       FeatureKind::kLps201,
                                       InputLayout::kFixed,
                                       ChannelFusion::kNone)});
    rows.push_back({"gru-LD-fbank80", make(Structure::kGruConv2d, "L,D",
                                           FeatureKind::kLfb80,
                                           InputLayout::kFixed,
                                           ChannelFusion::kNone)});
  } else if (preset == "table2") {
    rows.push_back({"fixed-8ch", make(Structure::kConv2d, "S",
                                      FeatureKind::kLps201,
                                      InputLayout::kFixed,
                                      ChannelFusion::kNone)});
    rows.push_back({"squeezed", make(Structure::kConv2d, "S",
                                     FeatureKind::kLps201,
                                     InputLayout::kSqueezed,
                                     ChannelFusion::kNone)});
    rows.push_back({"early_avg", make(Structure::kConv2d, "S",
                                      FeatureKind::kLps201,
                                      InputLayout::kExpanded,
                                      ChannelFusion::kEarlyAvg)});
    rows.push_back({"late_avg", make(Structure::kConv2d, "S",
                                     FeatureKind::kLps201,
                                     InputLayout::kExpanded,
                                     ChannelFusion::kLateAvg)});
    rows.push_back({"tac", make(Structure::kConv2d, "S",
                                FeatureKind::kLps201, InputLayout::kExpanded,
                                ChannelFusion::kTac)});
    rows.push_back({"dac", make(Structure::kConv2d, "S",
                                FeatureKind::kLps201, InputLayout::kExpanded,
                                ChannelFusion::kDac)});
    rows.push_back({"gru-L'D-dac-fbank80",
                    make(Structure::kGruConv2d, "L',D", FeatureKind::kLfb80,
                         InputLayout::kExpanded, ChannelFusion::kDac)});
  } else {
    Throw(ErrorClass::kBadConfig, "unknown preset: " + preset);
  }
  return rows;
}

int CmdBench(const RunConfig& cfg, bool have_custom_row,
             const std::string& preset, double batch_seconds, int repeats,
             int threads, uint64_t seed, const std::string& out_path) {
  std::vector<BenchRow> rows;
  if (!preset.empty()) rows = PresetRows(preset);
  if (have_custom_row || rows.empty())
    rows.push_back({"custom", cfg.BuildEmbeddingSpec(8)});

  MeasureOptions mo;
  mo.batch_seconds = batch_seconds;
  mo.repeats = repeats;
  mo.threads = threads;
  mo.seed = seed;

  std::ostringstream csv;
  WriteCsvHeader(csv);
  for (const BenchRow& row : rows) {
    CostReport rep = Measure(row.spec, mo);
    rep.name = row.name;
    WriteCsvRow(csv, row.spec, rep);
    std::cout << row.name << ": flops=" << rep.flops_total
              << " latency_ms=" << rep.latency_ms_median
              << " peak_bytes=" << rep.peak_bytes << " (" << rep.status
              << ")" << std::endl;
  }
  if (!out_path.empty()) {
    std::ofstream os(out_path, std::ios::trunc);
    if (!os) Throw(ErrorClass::kIoError, "cannot write: " + out_path);
    os << csv.str();
  } else {
    std::cout << csv.str();
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-channel spatial/spectral feature pipeline and "
               "channel-count-agnostic embedding front-end"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "key=value config file ([run])");

  // Shared run-config flags; flags > config file > defaults.
  std::string feature, topology, squeeze_method, fusion, structure, version;
  std::string channels;
  int blocks = 0, final_dim = 0, kframes = 0;
  int64_t seed = -1;

  auto add_run_flags = [&](CLI::App* cmd) {
    cmd->add_option("--feature", feature, "lps201 | lfb80 | lfb40");
    cmd->add_option("--topology", topology, "fixed | squeezed | expanded");
    cmd->add_option("--squeeze-method", squeeze_method,
                    "fixed_ch | random_ch | channel_avg | cca");
    cmd->add_option("--fusion", fusion,
                    "none | early_avg | late_avg | tac | dac");
    cmd->add_option("--structure", structure,
                    "conv2d | convnext | gru_conv2d");
    cmd->add_option("--version", version, "S | L | D | L,D | L' | L',D | sub");
    cmd->add_option("--channels", channels, "override triple, e.g. 16,32,128");
    cmd->add_option("--blocks", blocks, "override block/GRU-layer count");
    cmd->add_option("--final-dim", final_dim, "embedding dim D");
    cmd->add_option("--k", kframes, "solo kernel frames K");
    cmd->add_option("--seed", seed, "seed for weights/squeeze");
  };
  auto apply_run_flags = [&](RunConfig* cfg) {
    if (!feature.empty()) cfg->feature = ParseFeatureKind(feature);
    if (!topology.empty()) cfg->topology = ParseInputLayout(topology);
    if (!squeeze_method.empty())
      cfg->squeeze_method = ParseSqueezeMethod(squeeze_method);
    if (!fusion.empty()) cfg->fusion = ParseChannelFusion(fusion);
    if (!structure.empty()) cfg->structure = ParseStructure(structure);
    if (!version.empty()) cfg->version = version;
    if (!channels.empty()) {
      std::array<int, 3> c{};
      std::stringstream ss(channels);
      std::string tok;
      int i = 0;
      while (std::getline(ss, tok, ',') && i < 3) c[size_t(i++)] = std::stoi(tok);
      Require(i == 3, ErrorClass::kBadConfig,
              "--channels needs three values");
      cfg->channels_override = c;
    }
    if (blocks > 0) cfg->blocks_override = blocks;
    if (final_dim > 0) cfg->final_dim = final_dim;
    if (kframes > 0) cfg->kernel_frames = kframes;
    if (seed >= 0) cfg->seed = uint64_t(seed);
  };

  // extract
  auto* extract = app.add_subcommand(
      "extract", "mixture + solo wav -> fused feature tensor (SEF1)");
  std::string mixture, solo, out, list_path;
  int solo_start = -1, jobs = 1;
  extract->add_option("--mixture", mixture, "multi-channel mixture wav");
  extract->add_option("--solo", solo, "target solo segment wav");
  extract->add_option("--out", out, "output .sef path");
  extract->add_option("--solo-start-frame", solo_start,
                      "kernel start frame inside the solo (default: last K)");
  extract->add_option("--list", list_path,
                      "batch file: 'mixture solo out [start]' per line");
  extract->add_option("--jobs", jobs, "parallel files in batch mode")
      ->check(CLI::PositiveNumber);
  add_run_flags(extract);

  // embed
  auto* embed = app.add_subcommand(
      "embed", "fused feature tensor -> embedding (seeded forward pass)");
  std::string embed_in, embed_out, compare_path, dump_weights;
  double compare_tol = 1e-5;
  embed->add_option("--in", embed_in, "input features .sef")->required();
  embed->add_option("--out", embed_out, "output embedding .sef")->required();
  embed->add_option("--compare", compare_path,
                    "reference embedding to compare against");
  embed->add_option("--tol", compare_tol, "comparison tolerance");
  embed->add_option("--dump-weights", dump_weights,
                    "write <base>.sefw + <base>.manifest");
  add_run_flags(embed);

  // simulate
  auto* simulate = app.add_subcommand(
      "simulate", "scene config -> mixture/solo wav + dominance mask");
  std::string scene_path, out_dir = ".", prefix = "scene";
  simulate->add_option("--scene", scene_path, "scene config file")->required();
  simulate->add_option("--out-dir", out_dir, "output directory");
  simulate->add_option("--prefix", prefix, "output file prefix");

  // bench
  auto* bench = app.add_subcommand(
      "bench", "FLOPs + latency + peak-allocation report (CSV)");
  std::string preset, bench_out;
  double batch_seconds = 60.0;
  int repeats = 10, threads = 1;
  bench->add_option("--preset", preset, "table1 | table2");
  bench->add_option("--batch-seconds", batch_seconds,
                    "synthetic workload length");
  bench->add_option("--repeats", repeats, "timed runs per row (>= 3)");
  bench->add_option("--threads", threads, "worker threads (default 1)");
  bench->add_option("--out", bench_out, "CSV output path (default stdout)");
  add_run_flags(bench);

  // selftest
  auto* selftest = app.add_subcommand(
      "selftest", "run the full property/acceptance suite");
  double st_batch = 3.0;
  int st_repeats = 10;
  bool st_skip_latency = false;
  selftest->add_option("--batch-seconds", st_batch,
                       "latency-section batch length");
  selftest->add_option("--repeats", st_repeats, "latency-section repeats");
  selftest->add_flag("--skip-latency", st_skip_latency,
                     "skip wall-clock ordering checks");

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig cfg = LoadRunConfig(config_path);
    apply_run_flags(&cfg);

    if (extract->parsed()) {
      std::optional<int> start;
      if (solo_start >= 0) start = solo_start;
      return CmdExtract(extract, cfg, mixture, solo, out, start, list_path,
                        jobs);
    }
    if (embed->parsed())
      return CmdEmbed(cfg, embed_in, embed_out, compare_path, compare_tol,
                      dump_weights);
    if (simulate->parsed()) return CmdSimulate(scene_path, out_dir, prefix);
    if (bench->parsed()) {
      bool custom = !structure.empty() || !version.empty() ||
                    !topology.empty() || !fusion.empty() || !feature.empty();
      return CmdBench(cfg, custom, preset, batch_seconds, repeats, threads,
                      seed >= 0 ? uint64_t(seed) : 0, bench_out);
    }
    if (selftest->parsed()) {
      SelftestOptions opts;
      opts.bench_batch_seconds = st_batch;
      opts.bench_repeats = st_repeats;
      opts.skip_latency = st_skip_latency;
      return RunSelftest(std::cout, opts) ? 0 : 1;
    }
  } catch (const Error& e) {
    PrintError(ErrorClassName(e.cls()), e.what());
    return 2;
  } catch (const std::exception& e) {
    PrintError("Internal", e.what());
    return 1;
  }
  return 0;
}

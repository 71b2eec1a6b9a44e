// src/selftest.cpp

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

#include "spatialemb/selftest.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <sstream>
#include <vector>

#include "spatialemb/bench.hpp"
#include "spatialemb/config.hpp"
#include "spatialemb/embedding.hpp"
#include "spatialemb/ref.hpp"
#include "spatialemb/rng.hpp"
#include "spatialemb/scene.hpp"
#include "spatialemb/sef_io.hpp"
#include "spatialemb/spatial.hpp"
#include "spatialemb/stft.hpp"
#include "spatialemb/wav_io.hpp"

namespace spatialemb {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double MaxAbsDiff(const std::vector<float>& a, const std::vector<float>& b) {
  double m = 0.0;
  for (size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(double(a[i]) - b[i]));
  return m;
}

PhaseTensor RandomPhases(SplitMix64* rng, int m, int t, int f) {
  PhaseTensor rp;
  rp.num_channels = m;
  rp.num_frames = t;
  rp.num_bins = f;
  rp.values.resize(size_t(m) * t * f);
  for (auto& v : rp.values)
    v = float(rng->NextUniform(-3.14159265358979, 3.14159265358979));
  return rp;
}

PhaseTensor PermuteChannels(const PhaseTensor& rp,
                            const std::vector<int>& perm) {
  PhaseTensor out = rp;
  const size_t plane = size_t(rp.num_frames) * rp.num_bins;
  for (int m = 0; m < rp.num_channels; ++m)
    std::copy(rp.values.begin() + size_t(perm[m]) * plane,
              rp.values.begin() + size_t(perm[m] + 1) * plane,
              out.values.begin() + size_t(m) * plane);
  return out;
}

FusedInput RandomExpandedInput(SplitMix64* rng, int m, int t, int fd) {
  FusedInput in;
  in.layout = InputLayout::kExpanded;
  in.num_mics = m;
  in.data = FeatureTensor({{Axis::kChannel, uint64_t(m)},
                           {Axis::kFeatChannel, 2},
                           {Axis::kTime, uint64_t(t)},
                           {Axis::kFreq, uint64_t(fd)}});
  for (auto& v : in.data.data) v = float(rng->NextUniform(-1.0, 1.0));
  return in;
}

FusedInput PermuteExpanded(const FusedInput& in,
                           const std::vector<int>& perm) {
  FusedInput out = in;
  const size_t block = in.data.data.size() / size_t(in.num_mics);
  for (int m = 0; m < in.num_mics; ++m)
    std::copy(in.data.data.begin() + size_t(perm[m]) * block,
              in.data.data.begin() + size_t(perm[m] + 1) * block,
              out.data.data.begin() + size_t(m) * block);
  return out;
}

std::vector<int> RandomPermutation(SplitMix64* rng, int n) {
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  for (int i = n - 1; i > 0; --i)
    std::swap(p[i], p[size_t(rng->Next() % uint64_t(i + 1))]);
  return p;
}

Spectrogram RandomSpectrogram(SplitMix64* rng, int m, int t, int f) {
  Spectrogram s;
  s.num_channels = m;
  s.num_frames = t;
  s.num_bins = f;
  s.win_len_samples = 2 * (f - 1);
  s.hop_samples = (f - 1);
  s.sample_rate_hz = kPipelineSampleRate;
  s.coeffs.resize(size_t(m) * t * f);
  for (auto& c : s.coeffs)
    c = std::complex<float>(float(rng->NextUniform(-1.0, 1.0)),
                            float(rng->NextUniform(-1.0, 1.0)));
  return s;
}

ActTensor RandomAct(SplitMix64* rng, int m, int c, int t, int f) {
  ActTensor a(m, c, t, f);
  for (auto& v : a.v) v = float(rng->NextUniform(-1.0, 1.0));
  return a;
}

std::string ReadBytes(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(is)),
                     std::istreambuf_iterator<char>());
}

// Band-disjoint tone combs keep per-bin dominance persistent over time,
// which is what the K-frame kernel correlation needs. Stationary noise
// sources at 0 dB flip dominance frame to frame and wash out the target
// bins' correlation even where the instantaneous ratio clears 10 dB.
SceneSpec SeparationScene(uint64_t seed) {
  SceneSpec scene;
  scene.num_channels = 4;
  scene.duration_s = 2.0;
  scene.seed = seed;
  SourceSpec target;
  target.is_target = true;
  target.signal = SourceSpec::Signal::kTones;
  for (double f = 240.0; f <= 3200.0; f += 80.0) target.tone_hz.push_back(f);
  target.amplitude = 0.2;
  target.delay_samples = {0.0, 3.7, 7.1, 11.3};
  SourceSpec interferer;
  interferer.is_target = false;
  interferer.signal = SourceSpec::Signal::kTones;
  for (double f = 4240.0; f <= 7200.0; f += 80.0)
    interferer.tone_hz.push_back(f);
  interferer.amplitude = 0.2;
  interferer.snr_db = 0.0;
  interferer.delay_samples = {0.0, -2.9, 5.3, -8.6};
  scene.sources = {target, interferer};
  return scene;
}

class Runner {
 public:
  Runner(std::ostream& os) : os_(os) {}

  template <typename Fn>
  void Run(int id, const std::string& name, double budget_s, Fn fn) {
    auto t0 = std::chrono::steady_clock::now();
    bool ok = false;
    std::string detail;
    try {
      ok = fn(&detail);
    } catch (const std::exception& e) {
      ok = false;
      detail = std::string("exception: ") + e.what();
    }
    double elapsed = std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - t0)
                         .count();
    if (ok && budget_s > 0.0 && elapsed > budget_s) {
      ok = false;
      detail += " [exceeded " + std::to_string(budget_s) + " s budget]";
    }
    all_pass_ &= ok;
    os_ << (ok ? "[PASS] " : "[FAIL] ") << id << ". " << name << " ("
        << std::fixed << std::setprecision(1) << elapsed << " s)";
    if (!detail.empty()) os_ << " -- " << detail;
    os_ << "\n" << std::defaultfloat;
    os_.flush();
  }

  bool AllPass() const { return all_pass_; }

 private:
  std::ostream& os_;
  bool all_pass_ = true;
};

EmbeddingSpec SmallSpec(Structure st, InputLayout topo, ChannelFusion fus,
                        int mics, int fd) {
  EmbeddingSpec spec;
  spec.structure = st;
  spec.out_channels = {4, 6, 8};
  spec.num_blocks = 1;
  spec.feature_dim = fd;
  spec.topology = topo;
  spec.fusion = fus;
  spec.final_dim = 6;
  spec.num_mics = mics;
  return spec;
}

}  // namespace

bool RunSelftest(std::ostream& os, const SelftestOptions& opts) {
  Runner r(os);

  // 1. all-pairs spatial feature vs brute-force ordered pairs
  r.Run(1, "spatial-feature correctness (500 random + phase triple)", 10.0,
        [&](std::string* detail) {
          SplitMix64 rng(1001);
          double worst = 0.0;
          for (int c = 0; c < 500; ++c) {
            int m = 2 + int(rng.Next() % 7);
            int t = 1 + int(rng.Next() % 16);
            int f = 1 + int(rng.Next() % 16);
            PhaseTensor rp = RandomPhases(&rng, m, t, f);
            FeatureTensor fast = AllPairsSpatialFeature(rp);
            FeatureTensor brute = ref::AllPairsNaive(rp);
            worst = std::max(worst, MaxAbsDiff(fast.data, brute.data));
          }
          PhaseTensor tri;
          tri.num_channels = 3;
          tri.num_frames = 1;
          tri.num_bins = 1;
          tri.values = {0.0f, float(kTwoPi / 3.0), float(2.0 * kTwoPi / 3.0)};
          double v = AllPairsSpatialFeature(tri).data[0];
          std::ostringstream d;
          d << "max|fast-brute|=" << worst << ", triple=" << v;
          *detail = d.str();
          return worst <= 1e-6 && std::abs(v - (-0.5)) <= 1e-6;
        });

  // 2. channel-permutation invariance
  r.Run(2, "permutation invariance (all-pairs SF + fused forwards)", 60.0,
        [&](std::string* detail) {
          SplitMix64 rng(2002);
          double worst_sf = 0.0;
          for (int c = 0; c < 100; ++c) {
            int m = 2 + int(rng.Next() % 7);
            PhaseTensor rp = RandomPhases(&rng, m, 1 + int(rng.Next() % 8),
                                          1 + int(rng.Next() % 8));
            auto perm = RandomPermutation(&rng, m);
            FeatureTensor a = AllPairsSpatialFeature(rp);
            FeatureTensor b =
                AllPairsSpatialFeature(PermuteChannels(rp, perm));
            worst_sf = std::max(worst_sf, MaxAbsDiff(a.data, b.data));
          }

          double worst_fwd = 0.0;
          const ChannelFusion fusions[] = {
              ChannelFusion::kDac, ChannelFusion::kTac,
              ChannelFusion::kEarlyAvg, ChannelFusion::kLateAvg};
          for (ChannelFusion fus : fusions) {
            for (int c = 0; c < 100; ++c) {
              int m = 2 + int(rng.Next() % 3);
              int t = 4 + int(rng.Next() % 4);
              int fd = 8 + int(rng.Next() % 5);
              EmbeddingSpec spec = SmallSpec(
                  Structure::kConv2d, InputLayout::kExpanded, fus, m, fd);
              WeightStore w = InitWeights(spec, rng.Next());
              FusedInput in = RandomExpandedInput(&rng, m, t, fd);
              auto perm = RandomPermutation(&rng, m);
              FeatureTensor a = EmbedForward(spec, w, in);
              FeatureTensor b =
                  EmbedForward(spec, w, PermuteExpanded(in, perm));
              worst_fwd = std::max(worst_fwd, MaxAbsDiff(a.data, b.data));
            }
          }
          std::ostringstream d;
          d << "max diff: sf=" << worst_sf << ", forward=" << worst_fwd;
          *detail = d.str();
          return worst_sf <= 1e-5 && worst_fwd <= 1e-5;
        });

  // 3. oracle dominance separation
  r.Run(3, "oracle dominance separation (delay-model scene, 0 dB)", 30.0,
        [&](std::string* detail) {
          SceneSpec scene = SeparationScene(42);
          SfSeparation fwd = ComputeSfSeparation(scene, KernelSource::kTarget);
          SfSeparation swp =
              ComputeSfSeparation(scene, KernelSource::kInterferer);
          std::ostringstream d;
          d << "target kernel: " << fwd.mean_sf_target << " vs "
            << fwd.mean_sf_interferer << "; interferer kernel: "
            << swp.mean_sf_target << " vs " << swp.mean_sf_interferer;
          *detail = d.str();
          bool margin =
              fwd.mean_sf_target - fwd.mean_sf_interferer >= 0.3;
          bool flipped = swp.mean_sf_interferer > swp.mean_sf_target;
          return margin && flipped && fwd.num_target_bins > 0 &&
                 fwd.num_interferer_bins > 0;
        });

  // 4. kernel equivalences
  r.Run(4, "kernel equivalences (unit kernel, scale, naive oracles)", 60.0,
        [&](std::string* detail) {
          SplitMix64 rng(4004);
          std::ostringstream d;
          bool ok = true;

          // K=1 unit kernel == raw phase.
          Spectrogram y = RandomSpectrogram(&rng, 3, 12, 9);
          SoloKernel unit;
          unit.num_channels = 3;
          unit.num_frames = 1;
          unit.num_bins = 9;
          unit.frames.assign(27, std::complex<float>(1.0f, 0.0f));
          PhaseTensor rp = RirPhase(y, unit);
          double worst_unit = 0.0;
          for (int m = 0; m < 3; ++m)
            for (int t = 0; t < 12; ++t)
              for (int f = 0; f < 9; ++f) {
                auto c = y.Frame(m, t)[f];
                // The tensor stores float32, so the oracle rounds too.
                float raw = (c.real() == 0.0f && c.imag() == 0.0f)
                                ? 0.0f
                                : float(std::atan2(double(c.imag()),
                                                   double(c.real())));
                worst_unit = std::max(
                    worst_unit, std::abs(double(raw) - rp.At(m, t, f)));
              }
          ok &= worst_unit <= 1e-9;

          // Kernel scale invariance. Power-of-two factors scale float
          // mantissas exactly, keeping the check at representation
          // precision; other factors would add storage rounding on top of
          // the (exactly invariant) phase.
          SoloKernel k3;
          k3.num_channels = 3;
          k3.num_frames = 3;
          k3.num_bins = 9;
          k3.frames.resize(81);
          for (auto& c : k3.frames)
            c = std::complex<float>(float(rng.NextUniform(-1.0, 1.0)),
                                    float(rng.NextUniform(-1.0, 1.0)));
          PhaseTensor rp1 = RirPhase(y, k3);
          double worst_scale = 0.0;
          for (float alpha : {0.25f, 4.0f, 1024.0f}) {
            SoloKernel k3s = k3;
            for (auto& c : k3s.frames) c *= alpha;
            PhaseTensor rp2 = RirPhase(y, k3s);
            worst_scale = std::max(worst_scale,
                                   MaxAbsDiff(rp1.values, rp2.values));
          }
          ok &= worst_scale <= 1e-9;

          // Production kernels vs serial naive oracles.
          auto draw = [&](size_t n) {
            std::vector<float> v(n);
            for (auto& x : v) x = float(rng.NextUniform(-0.5, 0.5));
            return v;
          };
          double worst_conv = 0.0, worst_gru = 0.0, worst_next = 0.0,
                 worst_tac = 0.0;
          {
            ActTensor x = RandomAct(&rng, 1, 2, 5, 4);
            auto w = draw(3 * 2 * 3 * 3);
            auto b = draw(3);
            ActTensor yp, yn;
            Conv2dForward(x, w.data(), b.data(), 3, 3, 3, 1, 1, 1, 1, &yp);
            ref::Conv2dNaive(x, w.data(), b.data(), 3, 3, 3, 1, 1, 1, 1, &yn);
            worst_conv = MaxAbsDiff(yp.v, yn.v);
          }
          {
            ActTensor x = RandomAct(&rng, 1, 3, 4, 2);
            GruStackWeights gw;
            gw.hidden = 2;
            auto lw = draw(2 * 3), lb = draw(2);
            auto wih = draw(6 * 2), whh = draw(6 * 2), bih = draw(6),
                 bhh = draw(6);
            gw.lin_w = lw.data();
            gw.lin_b = lb.data();
            gw.layers.push_back({wih.data(), whh.data(), bih.data(),
                                 bhh.data()});
            ActTensor yp, yn;
            GruStackForward(x, gw, &yp);
            ref::GruStackNaive(x, gw, &yn);
            worst_gru = MaxAbsDiff(yp.v, yn.v);
          }
          {
            ActTensor x = RandomAct(&rng, 1, 4, 6, 5);
            ConvNextWeights cw;
            cw.channels = 4;
            auto dww = draw(4 * 49), dwb = draw(4), g = draw(4), be = draw(4);
            auto p1w = draw(16 * 4), p1b = draw(16), p2w = draw(4 * 16),
                 p2b = draw(4);
            cw.dw_w = dww.data();
            cw.dw_b = dwb.data();
            cw.ln_gamma = g.data();
            cw.ln_beta = be.data();
            cw.pw1_w = p1w.data();
            cw.pw1_b = p1b.data();
            cw.pw2_w = p2w.data();
            cw.pw2_b = p2b.data();
            ActTensor yp, yn;
            ConvNextBlockForward(x, cw, &yp);
            ref::ConvNextBlockNaive(x, cw, &yn);
            worst_next = MaxAbsDiff(yp.v, yn.v);
          }
          {
            ActTensor x = RandomAct(&rng, 3, 4, 3, 2);
            auto aw = draw(2 * 4), ab = draw(2), bw = draw(2 * 4),
                 bb = draw(2);
            ActTensor yp, yn;
            TacForward(x, aw.data(), ab.data(), bw.data(), bb.data(), &yp);
            ref::TacNaive(x, aw.data(), ab.data(), bw.data(), bb.data(), &yn);
            worst_tac = MaxAbsDiff(yp.v, yn.v);
          }
          ok &= worst_conv <= 1e-4 && worst_gru <= 1e-4 &&
                worst_next <= 1e-4 && worst_tac <= 1e-4;
          d << "unit=" << worst_unit << " scale=" << worst_scale
            << " conv=" << worst_conv << " gru=" << worst_gru
            << " next=" << worst_next << " tac=" << worst_tac;
          *detail = d.str();
          return ok;
        });

  // 5. Eq.1/2 consistency
  r.Run(5, "spectral consistency (identity filter bank, power scaling)", 30.0,
        [&](std::string* detail) {
          SplitMix64 rng(5005);
          MultiChannelWave wave;
          wave.num_channels = 2;
          wave.num_samples = 8000;
          wave.sample_rate_hz = kPipelineSampleRate;
          wave.samples.resize(16000);
          for (auto& v : wave.samples) v = float(rng.NextUniform(-0.4, 0.4));

          Spectrogram spec = ComputeStft(wave);
          FeatureTensor lps = LogPowerSpectrum(spec);

          FilterBank identity;
          identity.num_input_bins = spec.num_bins;
          identity.num_output_bins = spec.num_bins;
          identity.weights.assign(size_t(spec.num_bins) * spec.num_bins,
                                  0.0f);
          for (int i = 0; i < spec.num_bins; ++i)
            identity.weights[size_t(i) * spec.num_bins + i] = 1.0f;
          FeatureTensor lfb = LogFilterBank(spec, identity);
          double worst_id = MaxAbsDiff(lps.data, lfb.data);

          const float alpha = 2.5f;
          MultiChannelWave scaled = wave;
          for (auto& v : scaled.samples) v *= alpha / 4.0f;  // stay in range
          MultiChannelWave base = wave;
          for (auto& v : base.samples) v *= 0.25f;
          FeatureTensor lps_base = LogPowerSpectrum(ComputeStft(base));
          FeatureTensor lps_scaled = LogPowerSpectrum(ComputeStft(scaled));
          const double expect = 2.0 * std::log(double(alpha));
          double worst_shift = 0.0;
          for (size_t i = 0; i < lps_base.data.size(); ++i) {
            // Only bins above the floor in both spectra obey the shift law.
            if (lps_base.data[i] <= std::log(1e-10) + 1e-6 ||
                lps_scaled.data[i] <= std::log(1e-10) + 1e-6)
              continue;
            worst_shift = std::max(
                worst_shift,
                std::abs(double(lps_scaled.data[i]) - lps_base.data[i] -
                         expect));
          }
          std::ostringstream d;
          d << "identity-fb diff=" << worst_id
            << ", scaling diff=" << worst_shift;
          *detail = d.str();
          return worst_id <= 1e-6 && worst_shift <= 1e-5;
        });

  // 6. shape contracts for every Table-style row
  r.Run(6, "shape contracts (all structure/version rows)", 60.0,
        [&](std::string* detail) {
          struct Row {
            Structure structure;
            const char* version;
            int fd;
          };
          const Row rows[] = {
              {Structure::kConv2d, "S", 201},
              {Structure::kConv2d, "L", 201},
              {Structure::kConvNext, "S", 201},
              {Structure::kConvNext, "L", 201},
              {Structure::kGruConv2d, "S", 201},
              {Structure::kGruConv2d, "L", 201},
              {Structure::kConvNext, "D", 201},
              {Structure::kConvNext, "L,D", 201},
              {Structure::kGruConv2d, "D", 201},
              {Structure::kGruConv2d, "L,D", 201},
              {Structure::kConv2d, "S", 40},
              {Structure::kConv2d, "S", 80},
              {Structure::kConv2d, "sub", 201},
              {Structure::kGruConv2d, "L,D", 80},
          };
          const int t_in = 50;
          const int t_expect = 13;  // two stride-2 halvings of 50
          SplitMix64 rng(6006);
          int checked = 0;
          for (const Row& row : rows) {
            VersionInfo info = ResolveVersion(row.structure, row.version);
            EmbeddingSpec spec;
            spec.structure = row.structure;
            spec.out_channels = info.channels;
            spec.num_blocks = info.blocks;
            spec.freq_subsample_entry = info.freq_subsample_entry;
            spec.feature_dim = row.fd;
            spec.topology = InputLayout::kFixed;
            spec.fusion = ChannelFusion::kNone;
            spec.final_dim = 256;
            spec.num_mics = 8;

            WeightStore w = InitWeights(spec, 7);
            FusedInput in;
            in.layout = InputLayout::kFixed;
            in.num_mics = 8;
            in.data = FeatureTensor({{Axis::kChannel, 9},
                                     {Axis::kTime, uint64_t(t_in)},
                                     {Axis::kFreq, uint64_t(row.fd)}});
            for (auto& v : in.data.data)
              v = float(rng.NextUniform(-1.0, 1.0));

            ForwardTrace trace;
            FeatureTensor out = EmbedForward(spec, w, in, &trace);
            if (int(out.Extent(0)) != t_expect ||
                int(out.Extent(1)) != spec.final_dim) {
              *detail = std::string("bad output shape for ") +
                        StructureName(row.structure) + "/" + row.version;
              return false;
            }
            // Intermediate channel dims must walk the row's triple.
            std::vector<int> seen;
            for (const auto& e : trace.entries)
              if (e.layer == "entry.conv" || e.layer == "entry" ||
                  e.layer == "sub1.conv" || e.layer == "sub2.conv")
                seen.push_back(e.c);
            if (seen.size() != 3 || seen[0] != spec.out_channels[0] ||
                seen[1] != spec.out_channels[1] ||
                seen[2] != spec.out_channels[2]) {
              *detail = std::string("bad channel walk for ") +
                        StructureName(row.structure) + "/" + row.version;
              return false;
            }
            ++checked;
          }
          *detail = std::to_string(checked) + " rows instantiated";
          return true;
        });

  // 7. efficiency orderings + analytic/instrumented FLOP equality
  r.Run(7, "efficiency orderings and FLOP-counter equality", 300.0,
        [&](std::string* detail) {
          std::ostringstream d;
          // (a) analytic == instrumented, tiny configs (<= 1e5 FLOPs).
          struct Cfg {
            Structure st;
            InputLayout topo;
            ChannelFusion fus;
          };
          const Cfg cfgs[] = {
              {Structure::kConv2d, InputLayout::kFixed, ChannelFusion::kNone},
              {Structure::kConv2d, InputLayout::kSqueezed,
               ChannelFusion::kNone},
              {Structure::kConv2d, InputLayout::kExpanded,
               ChannelFusion::kDac},
              {Structure::kConv2d, InputLayout::kExpanded,
               ChannelFusion::kTac},
              {Structure::kConv2d, InputLayout::kExpanded,
               ChannelFusion::kEarlyAvg},
              {Structure::kConv2d, InputLayout::kExpanded,
               ChannelFusion::kLateAvg},
              {Structure::kGruConv2d, InputLayout::kFixed,
               ChannelFusion::kNone},
              {Structure::kGruConv2d, InputLayout::kExpanded,
               ChannelFusion::kDac},
          };
          SplitMix64 rng(7007);
          for (const Cfg& c : cfgs) {
            EmbeddingSpec spec = SmallSpec(c.st, c.topo, c.fus, 2, 8);
            spec.out_channels = {2, 4, 6};
            spec.final_dim = 4;
            const int t = 5;
            CostReport analytic = CountFlops(spec, t);
            if (analytic.flops_total > 100000) {
              *detail = "config exceeds 1e5 FLOPs: " + analytic.name;
              return false;
            }
            WeightStore w = InitWeights(spec, rng.Next());
            FusedInput in;
            in.layout = c.topo;
            in.num_mics = 2;
            if (c.topo == InputLayout::kExpanded)
              in.data = FeatureTensor({{Axis::kChannel, 2},
                                       {Axis::kFeatChannel, 2},
                                       {Axis::kTime, t},
                                       {Axis::kFreq, 8}});
            else
              in.data = FeatureTensor(
                  {{Axis::kChannel,
                    c.topo == InputLayout::kFixed ? uint64_t(3) : 2},
                   {Axis::kTime, t},
                   {Axis::kFreq, 8}});
            for (auto& v : in.data.data)
              v = float(rng.NextUniform(-1.0, 1.0));
            FlopMeter meter;
            (void)ref::ForwardNaive(spec, w, in, &meter);
            if (meter.flops != analytic.flops_total) {
              std::ostringstream e;
              e << "FLOP mismatch for " << analytic.name << ": analytic "
                << analytic.flops_total << " vs instrumented " << meter.flops;
              *detail = e.str();
              return false;
            }
          }
          // Also the tiny convnext config (slightly larger, still checked
          // for exact equality).
          {
            EmbeddingSpec spec =
                SmallSpec(Structure::kConvNext, InputLayout::kFixed,
                          ChannelFusion::kNone, 2, 8);
            spec.out_channels = {2, 4, 6};
            spec.final_dim = 4;
            CostReport analytic = CountFlops(spec, 5);
            WeightStore w = InitWeights(spec, rng.Next());
            FusedInput in;
            in.layout = InputLayout::kFixed;
            in.num_mics = 2;
            in.data = FeatureTensor(
                {{Axis::kChannel, 3}, {Axis::kTime, 5}, {Axis::kFreq, 8}});
            for (auto& v : in.data.data)
              v = float(rng.NextUniform(-1.0, 1.0));
            FlopMeter meter;
            (void)ref::ForwardNaive(spec, w, in, &meter);
            if (meter.flops != analytic.flops_total ||
                analytic.flops_total > 100000) {
              *detail = "convnext FLOP mismatch or too large";
              return false;
            }
          }

          // (b) DAC vs TAC: counted FLOPs strictly lower at identical config.
          EmbeddingSpec dac_spec;
          dac_spec.structure = Structure::kConv2d;
          dac_spec.out_channels = {16, 32, 128};
          dac_spec.feature_dim = 201;
          dac_spec.topology = InputLayout::kExpanded;
          dac_spec.fusion = ChannelFusion::kDac;
          dac_spec.num_mics = 8;
          EmbeddingSpec tac_spec = dac_spec;
          tac_spec.fusion = ChannelFusion::kTac;
          const int frames = int(opts.bench_batch_seconds * 100);
          uint64_t dac_flops = CountFlops(dac_spec, frames).flops_total;
          uint64_t tac_flops = CountFlops(tac_spec, frames).flops_total;
          if (!(dac_flops < tac_flops)) {
            *detail = "dac flops not below tac flops";
            return false;
          }
          d << "flops dac=" << dac_flops << " < tac=" << tac_flops;

          if (!opts.skip_latency) {
            MeasureOptions mo;
            mo.batch_seconds = opts.bench_batch_seconds;
            mo.repeats = opts.bench_repeats;
            mo.seed = 99;
            CostReport dac_rep = Measure(dac_spec, mo);
            CostReport tac_rep = Measure(tac_spec, mo);
            int wins = 0;
            for (int i = 0; i < mo.repeats; ++i)
              if (dac_rep.latencies_ms[i] < tac_rep.latencies_ms[i]) ++wins;
            d << "; latency dac=" << dac_rep.latency_ms_median
              << "ms tac=" << tac_rep.latency_ms_median << "ms, dac wins "
              << wins << "/" << mo.repeats;
            if (dac_rep.latency_ms_median >= tac_rep.latency_ms_median ||
                wins < 8) {
              *detail = d.str();
              return false;
            }

            EmbeddingSpec conv_s;
            conv_s.structure = Structure::kConv2d;
            conv_s.out_channels = {16, 32, 128};
            conv_s.feature_dim = 201;
            conv_s.topology = InputLayout::kFixed;
            conv_s.num_mics = 8;
            EmbeddingSpec next_l = conv_s;
            next_l.structure = Structure::kConvNext;
            next_l.out_channels = {64, 128, 184};
            next_l.num_blocks = 1;
            CostReport conv_rep = Measure(conv_s, mo);
            CostReport next_rep = Measure(next_l, mo);
            d << "; conv2d-S=" << conv_rep.latency_ms_median
              << "ms convnext-L=" << next_rep.latency_ms_median << "ms";
            if (conv_rep.latency_ms_median >= next_rep.latency_ms_median) {
              *detail = d.str();
              return false;
            }
          } else {
            d << "; latency section skipped";
          }
          *detail = d.str();
          return true;
        });

  // 8. determinism and DAC identities
  r.Run(8, "determinism (byte-identical reruns) and DAC identities", 120.0,
        [&](std::string* detail) {
          namespace fs = std::filesystem;
          SplitMix64 rng(8008);
          fs::path dir = fs::temp_directory_path() /
                         ("spatialemb_selftest_" +
                          std::to_string(rng.Next() & 0xffffff));
          fs::create_directories(dir);
          struct Cleanup {
            fs::path d;
            ~Cleanup() {
              std::error_code ec;
              fs::remove_all(d, ec);
            }
          } cleanup{dir};

          // simulate: same seed -> identical WAV bytes.
          SceneSpec scene = SeparationScene(321);
          scene.duration_s = 1.0;
          SceneRender r1 = Synthesize(scene);
          SceneRender r2 = Synthesize(scene);
          WriteWav((dir / "a.wav").string(), r1.mixture);
          WriteWav((dir / "b.wav").string(), r2.mixture);
          if (ReadBytes((dir / "a.wav").string()) !=
              ReadBytes((dir / "b.wav").string())) {
            *detail = "simulate rerun not byte-identical";
            return false;
          }

          // extract: same pipeline twice -> identical SEF bytes.
          auto extract_once = [&](const std::string& out) {
            Spectrogram mix = ComputeStft(r1.mixture);
            Spectrogram solo = ComputeStft(r1.target_solo);
            SoloKernel k =
                ExtractKernel(solo, solo.num_frames - 10, 10);
            FeatureTensor sf =
                AllPairsSpatialFeature(RirPhase(mix, k));
            FeatureTensor lps = LogPowerSpectrum(mix);
            WriteFeature(out, FuseFixed(lps, sf).data);
          };
          extract_once((dir / "f1.sef").string());
          extract_once((dir / "f2.sef").string());
          if (ReadBytes((dir / "f1.sef").string()) !=
              ReadBytes((dir / "f2.sef").string())) {
            *detail = "extract rerun not byte-identical";
            return false;
          }

          // embed: same seed -> identical output file bytes.
          EmbeddingSpec spec = SmallSpec(Structure::kConv2d,
                                         InputLayout::kExpanded,
                                         ChannelFusion::kDac, 3, 12);
          WeightStore w = InitWeights(spec, 11);
          FusedInput in = RandomExpandedInput(&rng, 3, 9, 12);
          WriteFeature((dir / "e1.sef").string(), EmbedForward(spec, w, in));
          WriteFeature((dir / "e2.sef").string(), EmbedForward(spec, w, in));
          if (ReadBytes((dir / "e1.sef").string()) !=
              ReadBytes((dir / "e2.sef").string())) {
            *detail = "embed rerun not byte-identical";
            return false;
          }

          // DAC idempotence and M=1 identity.
          ActTensor x = RandomAct(&rng, 4, 6, 5, 7);
          ActTensor once, twice;
          DacForward(x, &once);
          DacForward(once, &twice);
          if (MaxAbsDiff(once.v, twice.v) > 1e-9) {
            *detail = "dac not idempotent";
            return false;
          }
          ActTensor x1 = RandomAct(&rng, 1, 6, 5, 7);
          ActTensor y1;
          DacForward(x1, &y1);
          if (x1.v != y1.v) {
            *detail = "dac at M=1 is not the identity";
            return false;
          }
          *detail = "simulate/extract/embed reruns byte-identical";
          return true;
        });

  return r.AllPass();
}

}  // namespace spatialemb

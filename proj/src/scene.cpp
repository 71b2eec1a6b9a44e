// src/scene.cpp

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

#include "spatialemb/scene.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>

#include "spatialemb/config.hpp"
#include "spatialemb/fft.hpp"
#include "spatialemb/rng.hpp"

namespace spatialemb {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kPeakCeiling = 0.99;

std::vector<double> GenerateSignal(const SourceSpec& src, int64_t num_samples,
                                   uint64_t seed) {
  std::vector<double> sig(size_t(num_samples), 0.0);
  SplitMix64 rng(seed);
  if (src.signal == SourceSpec::Signal::kNoise) {
    for (auto& v : sig) v = rng.NextGaussian();
  } else {
    Require(!src.tone_hz.empty(), ErrorClass::kBadScene,
            "tone source without tone_hz");
    std::vector<double> phase(src.tone_hz.size());
    for (auto& p : phase) p = rng.NextUniform(0.0, kTwoPi);
    for (int64_t n = 0; n < num_samples; ++n) {
      double v = 0.0;
      for (size_t i = 0; i < src.tone_hz.size(); ++i)
        v += std::sin(kTwoPi * src.tone_hz[i] * double(n) /
                          kPipelineSampleRate +
                      phase[i]);
      sig[size_t(n)] = v;
    }
  }
  // Unit RMS so that amplitude and snr_db work in absolute terms.
  double ss = 0.0;
  for (double v : sig) ss += v * v;
  double rms = std::sqrt(ss / double(num_samples));
  Require(rms > 0.0, ErrorClass::kBadScene, "source signal is all zero");
  for (auto& v : sig) v /= rms;
  return sig;
}

// Circular fractional delay via a linear-phase multiply in the frequency
// domain. The Nyquist bin gets the real-valued cos term to keep the output
// real.
std::vector<double> DelaySignal(const std::vector<double>& sig, double delay,
                                const Fft& plan) {
  const size_t n = sig.size();
  std::vector<cdouble> in(n), freq(n);
  for (size_t i = 0; i < n; ++i) in[i] = cdouble(sig[i], 0.0);
  plan.Transform(in.data(), freq.data());
  for (size_t k = 0; k < n; ++k) {
    double signed_k =
        (k <= n / 2) ? double(k) : double(k) - double(n);
    if (n % 2 == 0 && k == n / 2) {
      freq[k] *= std::cos(kTwoPi * 0.5 * delay);  // cos(pi * d)
      continue;
    }
    double a = -kTwoPi * delay * signed_k / double(n);
    freq[k] *= cdouble(std::cos(a), std::sin(a));
  }
  std::vector<cdouble> out(n);
  plan.Inverse(freq.data(), out.data());
  std::vector<double> res(n);
  for (size_t i = 0; i < n; ++i) res[i] = out[i].real() / double(n);
  return res;
}

MultiChannelWave ZeroWave(int channels, int64_t num_samples) {
  MultiChannelWave w;
  w.num_channels = channels;
  w.num_samples = num_samples;
  w.sample_rate_hz = kPipelineSampleRate;
  w.samples.assign(size_t(channels) * size_t(num_samples), 0.0f);
  return w;
}

}  // namespace

void SceneSpec::Validate() const {
  Require(num_channels >= 1 && num_channels <= kMaxChannels,
          ErrorClass::kBadScene, "bad channel count");
  Require(duration_s >= 0.5, ErrorClass::kBadScene,
          "duration must be >= 0.5 s");
  Require(!sources.empty(), ErrorClass::kBadScene, "no sources");
  bool has_target = false;
  for (const auto& s : sources) {
    if (s.is_target) has_target = true;
    Require(int(s.delay_samples.size()) == num_channels,
            ErrorClass::kBadScene,
            "each source needs one delay per channel");
    for (double d : s.delay_samples)
      Require(std::isfinite(d), ErrorClass::kBadScene, "non-finite delay");
    Require(std::isfinite(s.amplitude) && s.amplitude > 0.0,
            ErrorClass::kBadScene, "amplitude must be positive");
    if (s.snr_db.has_value())
      Require(std::isfinite(*s.snr_db), ErrorClass::kBadScene,
              "non-finite snr_db");
  }
  Require(has_target, ErrorClass::kBadScene, "no source marked target");
}

SceneRender Synthesize(const SceneSpec& scene) {
  scene.Validate();
  const int64_t num_samples =
      int64_t(std::llround(scene.duration_s * kPipelineSampleRate));
  const int channels = scene.num_channels;
  const Fft plan{size_t(num_samples)};

  // Per-source seeds from one stream, so adding a source does not change
  // the earlier ones.
  SplitMix64 seeder(scene.seed);
  std::vector<uint64_t> seeds;
  for (size_t i = 0; i < scene.sources.size(); ++i)
    seeds.push_back(seeder.Next());

  // Reference amplitude for snr_db: combined target amplitude.
  double target_amp_sq = 0.0;
  for (const auto& s : scene.sources)
    if (s.is_target) target_amp_sq += s.amplitude * s.amplitude;
  const double target_amp = std::sqrt(target_amp_sq);

  std::vector<double> gains(scene.sources.size());
  for (size_t i = 0; i < scene.sources.size(); ++i) {
    const auto& s = scene.sources[i];
    if (!s.is_target && s.snr_db.has_value())
      gains[i] = target_amp * std::pow(10.0, -*s.snr_db / 20.0);
    else
      gains[i] = s.amplitude;
  }

  // Render each source at each channel (double precision until scaling).
  std::vector<std::vector<std::vector<double>>> rendered(
      scene.sources.size());
  double peak = 0.0;
  std::vector<double> mix_probe(size_t(channels) * size_t(num_samples), 0.0);
  for (size_t i = 0; i < scene.sources.size(); ++i) {
    std::vector<double> sig =
        GenerateSignal(scene.sources[i], num_samples, seeds[i]);
    rendered[i].resize(channels);
    for (int m = 0; m < channels; ++m) {
      rendered[i][m] =
          DelaySignal(sig, scene.sources[i].delay_samples[m], plan);
      for (auto& v : rendered[i][m]) v *= gains[i];
      double* probe = mix_probe.data() + size_t(m) * num_samples;
      const auto& ch = rendered[i][m];
      for (int64_t n = 0; n < num_samples; ++n) probe[size_t(n)] += ch[size_t(n)];
    }
  }
  for (size_t i = 0; i < rendered.size(); ++i)
    for (int m = 0; m < channels; ++m)
      for (double v : rendered[i][m]) peak = std::max(peak, std::abs(v));
  for (double v : mix_probe) peak = std::max(peak, std::abs(v));

  // Common headroom scale, applied to every source so time-domain
  // additivity survives exactly.
  const double scale = peak > kPeakCeiling ? kPeakCeiling / peak : 1.0;

  SceneRender render;
  render.source_waves.resize(scene.sources.size());
  for (size_t i = 0; i < scene.sources.size(); ++i) {
    render.source_waves[i] = ZeroWave(channels, num_samples);
    for (int m = 0; m < channels; ++m) {
      float* dst = render.source_waves[i].Channel(m);
      for (int64_t n = 0; n < num_samples; ++n)
        dst[size_t(n)] = float(rendered[i][m][size_t(n)] * scale);
    }
  }

  render.mixture = ZeroWave(channels, num_samples);
  render.target_solo = ZeroWave(channels, num_samples);
  for (int m = 0; m < channels; ++m) {
    float* mix = render.mixture.Channel(m);
    float* solo = render.target_solo.Channel(m);
    for (size_t i = 0; i < scene.sources.size(); ++i) {
      const float* src = render.source_waves[i].Channel(m);
      for (int64_t n = 0; n < num_samples; ++n) {
        mix[size_t(n)] += src[size_t(n)];
        if (scene.sources[i].is_target) solo[size_t(n)] += src[size_t(n)];
      }
    }
  }

  // Dominance mask from the per-component STFT powers.
  MultiChannelWave interferer_sum = ZeroWave(channels, num_samples);
  bool has_interferer = false;
  for (size_t i = 0; i < scene.sources.size(); ++i) {
    if (scene.sources[i].is_target) continue;
    has_interferer = true;
    for (int m = 0; m < channels; ++m) {
      float* dst = interferer_sum.Channel(m);
      const float* src = render.source_waves[i].Channel(m);
      for (int64_t n = 0; n < num_samples; ++n) dst[size_t(n)] += src[size_t(n)];
    }
  }

  Spectrogram target_spec = ComputeStft(render.target_solo);
  render.mask.num_frames = target_spec.num_frames;
  render.mask.num_bins = target_spec.num_bins;
  render.mask.labels.assign(
      size_t(target_spec.num_frames) * target_spec.num_bins, 0);

  const double ratio = std::pow(10.0, kDominanceThresholdDb / 10.0);
  if (!has_interferer) {
    std::fill(render.mask.labels.begin(), render.mask.labels.end(),
              int8_t(1));
  } else {
    Spectrogram intf_spec = ComputeStft(interferer_sum);
    for (int t = 0; t < target_spec.num_frames; ++t)
      for (int f = 0; f < target_spec.num_bins; ++f) {
        double pt = 0.0, pi = 0.0;
        for (int m = 0; m < channels; ++m) {
          auto yt = target_spec.Frame(m, t)[f];
          auto yi = intf_spec.Frame(m, t)[f];
          pt += double(yt.real()) * yt.real() + double(yt.imag()) * yt.imag();
          pi += double(yi.real()) * yi.real() + double(yi.imag()) * yi.imag();
        }
        int8_t label = 0;
        if (pt > pi * ratio)
          label = 1;
        else if (pt * ratio < pi)
          label = -1;
        render.mask.labels[size_t(t) * target_spec.num_bins + f] = label;
      }
  }
  return render;
}

FeatureTensor MaskToTensor(const DominanceMask& mask) {
  FeatureTensor t({{Axis::kTime, uint64_t(mask.num_frames)},
                   {Axis::kFreq, uint64_t(mask.num_bins)}});
  for (size_t i = 0; i < mask.labels.size(); ++i)
    t.data[i] = float(mask.labels[i]);
  return t;
}

SceneSpec ParseSceneConfigText(const std::string& text) {
  SceneSpec scene;
  bool saw_scene = false;
  for (const ConfigSection& sec : ParseKeyValueText(text)) {
    if (sec.name == "scene") {
      Require(!saw_scene, ErrorClass::kBadConfig,
              "duplicate [scene] section");
      saw_scene = true;
      scene.num_channels = int(sec.GetInt("channels", 0));
      scene.duration_s = sec.GetDouble("duration_s", 0.0);
      scene.seed = uint64_t(sec.GetInt("seed", 0));
      if (sec.Has("sample_rate_hz"))
        Require(sec.GetInt("sample_rate_hz", kPipelineSampleRate) ==
                    kPipelineSampleRate,
                ErrorClass::kSampleRateMismatch,
                "scenes are rendered at 16 kHz");
    } else if (sec.name == "source") {
      SourceSpec src;
      std::string role = sec.GetString("role", "interferer");
      Require(role == "target" || role == "interferer",
              ErrorClass::kBadConfig, "role must be target or interferer");
      src.is_target = role == "target";
      std::string signal = sec.GetString("signal", "noise");
      Require(signal == "noise" || signal == "tones",
              ErrorClass::kBadConfig, "signal must be noise or tones");
      src.signal = signal == "noise" ? SourceSpec::Signal::kNoise
                                     : SourceSpec::Signal::kTones;
      src.tone_hz = sec.GetDoubleList("tone_hz");
      src.amplitude = sec.GetDouble("amplitude", 0.25);
      if (sec.Has("snr_db")) src.snr_db = sec.GetDouble("snr_db", 0.0);
      src.delay_samples = sec.GetDoubleList("delays");
      scene.sources.push_back(std::move(src));
    } else {
      Throw(ErrorClass::kBadConfig, "unknown section [" + sec.name + "]");
    }
  }
  Require(saw_scene, ErrorClass::kBadConfig, "missing [scene] section");
  scene.Validate();
  return scene;
}

SceneSpec ParseSceneConfig(const std::string& path) {
  std::ifstream is(path);
  if (!is) Throw(ErrorClass::kIoError, "cannot open: " + path);
  std::string text((std::istreambuf_iterator<char>(is)),
                   std::istreambuf_iterator<char>());
  return ParseSceneConfigText(text);
}

SfSeparation ComputeSfSeparation(const SceneSpec& scene, KernelSource source,
                                 int kernel_frames) {
  SceneRender render = Synthesize(scene);
  Require(scene.num_channels >= 2, ErrorClass::kNeedTwoChannels,
          "separation analysis needs M >= 2");

  MultiChannelWave solo = ZeroWave(scene.num_channels,
                                   render.mixture.num_samples);
  bool any = false;
  for (size_t i = 0; i < scene.sources.size(); ++i) {
    bool pick = (source == KernelSource::kTarget)
                    ? scene.sources[i].is_target
                    : !scene.sources[i].is_target;
    if (!pick) continue;
    any = true;
    for (int m = 0; m < scene.num_channels; ++m) {
      float* dst = solo.Channel(m);
      const float* src = render.source_waves[i].Channel(m);
      for (int64_t n = 0; n < solo.num_samples; ++n) dst[size_t(n)] += src[size_t(n)];
    }
  }
  Require(any, ErrorClass::kBadScene,
          source == KernelSource::kTarget ? "no target source"
                                          : "no interferer source");

  Spectrogram mix_spec = ComputeStft(render.mixture);
  Spectrogram solo_spec = ComputeStft(solo);
  Require(solo_spec.num_frames >= kernel_frames, ErrorClass::kTooShort,
          "solo segment shorter than the kernel");
  SoloKernel kernel = ExtractKernel(
      solo_spec, solo_spec.num_frames - kernel_frames, kernel_frames);
  PhaseTensor rp = RirPhase(mix_spec, kernel);
  FeatureTensor sf = AllPairsSpatialFeature(rp);

  SfSeparation sep;
  double sum_t = 0.0, sum_i = 0.0;
  for (int t = 0; t < render.mask.num_frames; ++t)
    for (int f = 0; f < render.mask.num_bins; ++f) {
      float v = sf.data[size_t(t) * render.mask.num_bins + f];
      int8_t label = render.mask.At(t, f);
      if (label == 1) {
        sum_t += v;
        ++sep.num_target_bins;
      } else if (label == -1) {
        sum_i += v;
        ++sep.num_interferer_bins;
      }
    }
  if (sep.num_target_bins) sep.mean_sf_target = sum_t / double(sep.num_target_bins);
  if (sep.num_interferer_bins)
    sep.mean_sf_interferer = sum_i / double(sep.num_interferer_bins);
  return sep;
}

}  // namespace spatialemb

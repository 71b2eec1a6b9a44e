// src/stft.cpp

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

#include "spatialemb/stft.hpp"

#include <cmath>
#include <vector>

#include "spatialemb/fft.hpp"

namespace spatialemb {

std::vector<double> PeriodicHann(int win_len) {
  std::vector<double> w(win_len);
  for (int i = 0; i < win_len; ++i)
    w[i] = 0.5 * (1.0 - std::cos(6.283185307179586 * double(i) /
                                 double(win_len)));
  return w;
}

Spectrogram ComputeStft(const MultiChannelWave& wave, double win_len_ms,
                        double hop_ms) {
  wave.Validate();
  int win_len = int(std::lround(win_len_ms * wave.sample_rate_hz / 1000.0));
  int hop = int(std::lround(hop_ms * wave.sample_rate_hz / 1000.0));
  Require(win_len > 0 && hop > 0, ErrorClass::kBadShape,
          "window and hop must be positive");
  Require(wave.num_samples >= win_len, ErrorClass::kTooShort,
          "waveform shorter than one window");

  Spectrogram spec;
  spec.num_channels = wave.num_channels;
  spec.win_len_samples = win_len;
  spec.hop_samples = hop;
  spec.sample_rate_hz = wave.sample_rate_hz;
  spec.num_frames = int((wave.num_samples - win_len) / hop) + 1;
  spec.num_bins = win_len / 2 + 1;
  spec.coeffs.assign(size_t(spec.num_channels) * spec.num_frames *
                         spec.num_bins,
                     std::complex<float>(0.0f, 0.0f));

  const std::vector<double> window = PeriodicHann(win_len);
  const Fft plan{size_t(win_len)};

  const int m_count = spec.num_channels;
  const int t_count = spec.num_frames;
#pragma omp parallel for collapse(2) schedule(static)
  for (int m = 0; m < m_count; ++m) {
    for (int t = 0; t < t_count; ++t) {
      std::vector<double> frame(win_len);
      const float* x = wave.Channel(m) + int64_t(t) * hop;
      for (int i = 0; i < win_len; ++i) frame[i] = window[i] * double(x[i]);
      std::vector<cdouble> bins;
      RealFftOneSided(plan, frame.data(), &bins);
      std::complex<float>* out = spec.Frame(m, t);
      for (int f = 0; f < spec.num_bins; ++f)
        out[f] = std::complex<float>(float(bins[f].real()),
                                     float(bins[f].imag()));
    }
  }
  return spec;
}

FeatureTensor LogPowerSpectrum(const Spectrogram& spec, double floor_eps) {
  FeatureTensor t({{Axis::kChannel, uint64_t(spec.num_channels)},
                   {Axis::kTime, uint64_t(spec.num_frames)},
                   {Axis::kFreq, uint64_t(spec.num_bins)}});
  const size_t n = t.data.size();
#pragma omp parallel for schedule(static)
  for (size_t i = 0; i < n; ++i) {
    double re = spec.coeffs[i].real();
    double im = spec.coeffs[i].imag();
    double p = re * re + im * im;
    t.data[i] = float(std::log(p > floor_eps ? p : floor_eps));
  }
  return t;
}

FilterBank MelFilterBank(int num_input_bins, int num_output_bins,
                         int sample_rate_hz) {
  Require(num_output_bins >= 1 && num_output_bins < num_input_bins,
          ErrorClass::kBadShape, "need 1 <= F' < F");
  Require(sample_rate_hz > 0, ErrorClass::kBadShape, "bad sample rate");

  auto hz_to_mel = [](double hz) {
    return 2595.0 * std::log10(1.0 + hz / 700.0);
  };
  const double nyquist = sample_rate_hz / 2.0;
  const double mel_max = hz_to_mel(nyquist);
  // F'+2 edge points, equally spaced in mel from 0 Hz to Nyquist.
  std::vector<double> edges(num_output_bins + 2);
  for (int j = 0; j < num_output_bins + 2; ++j)
    edges[j] = mel_max * double(j) / double(num_output_bins + 1);

  FilterBank fb;
  fb.num_input_bins = num_input_bins;
  fb.num_output_bins = num_output_bins;
  fb.weights.assign(size_t(num_input_bins) * num_output_bins, 0.0f);

  const double bin_hz = nyquist / double(num_input_bins - 1);
  std::vector<double> col_sum(num_output_bins, 0.0);
  std::vector<std::vector<double>> w(
      num_input_bins, std::vector<double>(num_output_bins, 0.0));
  for (int i = 0; i < num_input_bins; ++i) {
    double mel = hz_to_mel(i * bin_hz);
    for (int j = 0; j < num_output_bins; ++j) {
      double lo = edges[j], mid = edges[j + 1], hi = edges[j + 2];
      double v = 0.0;
      if (mel > lo && mel < mid)
        v = (mel - lo) / (mid - lo);
      else if (mel >= mid && mel < hi)
        v = (hi - mel) / (hi - mid);
      if (v > 0.0) {
        w[i][j] = v;
        col_sum[j] += v;
      }
    }
  }
  for (int j = 0; j < num_output_bins; ++j)
    Require(col_sum[j] > 0.0, ErrorClass::kBadShape,
            "filter " + std::to_string(j) + " covers no input bin");
  for (int i = 0; i < num_input_bins; ++i)
    for (int j = 0; j < num_output_bins; ++j)
      fb.weights[size_t(i) * num_output_bins + j] =
          float(w[i][j] / col_sum[j]);
  return fb;
}

FeatureTensor LogFilterBank(const Spectrogram& spec, const FilterBank& fb,
                            double floor_eps) {
  Require(fb.num_input_bins == spec.num_bins, ErrorClass::kShapeMismatch,
          "filter bank F does not match spectrogram");
  const int m_count = spec.num_channels;
  const int t_count = spec.num_frames;
  const int f_in = spec.num_bins;
  const int f_out = fb.num_output_bins;
  FeatureTensor t({{Axis::kChannel, uint64_t(m_count)},
                   {Axis::kTime, uint64_t(t_count)},
                   {Axis::kBin, uint64_t(f_out)}});
#pragma omp parallel for collapse(2) schedule(static)
  for (int m = 0; m < m_count; ++m) {
    for (int ti = 0; ti < t_count; ++ti) {
      const std::complex<float>* y = spec.Frame(m, ti);
      std::vector<double> acc(f_out, 0.0);
      for (int i = 0; i < f_in; ++i) {
        double re = y[i].real(), im = y[i].imag();
        double p = re * re + im * im;
        if (p == 0.0) continue;
        const float* row = fb.weights.data() + size_t(i) * f_out;
        for (int j = 0; j < f_out; ++j)
          if (row[j] != 0.0f) acc[j] += p * double(row[j]);
      }
      float* out = t.data.data() + (size_t(m) * t_count + ti) * f_out;
      for (int j = 0; j < f_out; ++j)
        out[j] = float(std::log(acc[j] > floor_eps ? acc[j] : floor_eps));
    }
  }
  return t;
}

}  // namespace spatialemb

// src/spatial.cpp

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

#include "spatialemb/spatial.hpp"

#include <algorithm>
#include <cmath>

namespace spatialemb {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

// Phase in (-pi, pi]; atan2 can return exactly -pi for (-x, -0.0).
inline float PhaseOf(double re, double im) {
  if (re == 0.0 && im == 0.0) return 0.0f;
  double p = std::atan2(im, re);
  if (p <= -kPi) p = kPi;
  return float(p);
}

}  // namespace

SoloKernel ExtractKernel(const Spectrogram& solo_spec, int start_frame,
                         int num_frames) {
  Require(num_frames >= 1, ErrorClass::kOutOfRange, "K must be >= 1");
  Require(start_frame >= 0 &&
              start_frame + num_frames <= solo_spec.num_frames,
          ErrorClass::kOutOfRange,
          "kernel window [" + std::to_string(start_frame) + ", " +
              std::to_string(start_frame + num_frames) + ") exceeds T=" +
              std::to_string(solo_spec.num_frames));

  SoloKernel k;
  k.num_channels = solo_spec.num_channels;
  k.num_frames = num_frames;
  k.num_bins = solo_spec.num_bins;
  k.frames.resize(size_t(k.num_channels) * num_frames * k.num_bins);
  for (int m = 0; m < k.num_channels; ++m)
    for (int kk = 0; kk < num_frames; ++kk) {
      const std::complex<float>* src = solo_spec.Frame(m, start_frame + kk);
      std::complex<float>* dst =
          k.frames.data() + (size_t(m) * num_frames + kk) * k.num_bins;
      for (int f = 0; f < k.num_bins; ++f) dst[f] = src[f];
    }
  return k;
}

PhaseTensor RirPhase(const Spectrogram& mix, const SoloKernel& kernel) {
  Require(mix.num_channels == kernel.num_channels &&
              mix.num_bins == kernel.num_bins,
          ErrorClass::kShapeMismatch,
          "kernel M/F does not match spectrogram");

  PhaseTensor rp;
  rp.num_channels = mix.num_channels;
  rp.num_frames = mix.num_frames;
  rp.num_bins = mix.num_bins;
  rp.values.resize(size_t(rp.num_channels) * rp.num_frames * rp.num_bins);

  const int m_count = rp.num_channels;
  const int t_count = rp.num_frames;
  const int f_count = rp.num_bins;
  const int k_count = kernel.num_frames;
#pragma omp parallel for collapse(2) schedule(static)
  for (int m = 0; m < m_count; ++m) {
    for (int t = 0; t < t_count; ++t) {
      float* out = rp.values.data() + (size_t(m) * t_count + t) * f_count;
      // k is bounded by the frames actually available behind t (zero
      // history before frame 0).
      const int k_lim = std::min(k_count, t + 1);
      for (int f = 0; f < f_count; ++f) {
        double acc_re = 0.0, acc_im = 0.0;
        for (int k = 0; k < k_lim; ++k) {
          const std::complex<float> y = mix.Frame(m, t - k)[f];
          const std::complex<float> r = kernel.Frame(m, k)[f];
          // y * conj(r)
          acc_re += double(y.real()) * r.real() + double(y.imag()) * r.imag();
          acc_im += double(y.imag()) * r.real() - double(y.real()) * r.imag();
        }
        out[f] = PhaseOf(acc_re, acc_im);
      }
    }
  }
  return rp;
}

FeatureTensor PairwiseSpatialFeature(const PhaseTensor& rp, int m1, int m2) {
  Require(m1 >= 0 && m1 < rp.num_channels && m2 >= 0 &&
              m2 < rp.num_channels && m1 != m2,
          ErrorClass::kBadChannelIndex,
          "bad channel pair (" + std::to_string(m1) + ", " +
              std::to_string(m2) + ")");
  const int t_count = rp.num_frames;
  const int f_count = rp.num_bins;
  FeatureTensor sf(
      {{Axis::kTime, uint64_t(t_count)}, {Axis::kFreq, uint64_t(f_count)}});
#pragma omp parallel for schedule(static)
  for (int t = 0; t < t_count; ++t) {
    float* out = sf.data.data() + size_t(t) * f_count;
    for (int f = 0; f < f_count; ++f)
      out[f] = float(std::cos(double(rp.At(m1, t, f)) - rp.At(m2, t, f)));
  }
  return sf;
}

FeatureTensor AllPairsSpatialFeature(const PhaseTensor& rp) {
  const int m_count = rp.num_channels;
  Require(m_count >= 2, ErrorClass::kNeedTwoChannels,
          "all-pairs SF needs M >= 2");
  const int t_count = rp.num_frames;
  const int f_count = rp.num_bins;
  FeatureTensor sf(
      {{Axis::kTime, uint64_t(t_count)}, {Axis::kFreq, uint64_t(f_count)}});
  const double norm = 1.0 / (double(m_count) * (m_count - 1));
#pragma omp parallel for schedule(static)
  for (int t = 0; t < t_count; ++t) {
    float* out = sf.data.data() + size_t(t) * f_count;
    for (int f = 0; f < f_count; ++f) {
      // sum_{i != j} cos(p_i - p_j) = |sum_m e^{i p_m}|^2 - M
      double sum_cos = 0.0, sum_sin = 0.0;
      for (int m = 0; m < m_count; ++m) {
        double p = rp.At(m, t, f);
        sum_cos += std::cos(p);
        sum_sin += std::sin(p);
      }
      double v = (sum_cos * sum_cos + sum_sin * sum_sin - m_count) * norm;
      out[f] = float(v);
    }
  }
  return sf;
}

}  // namespace spatialemb

// src/fusion.cpp

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

#include "spatialemb/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "spatialemb/rng.hpp"

namespace spatialemb {

const char* InputLayoutName(InputLayout l) {
  switch (l) {
    case InputLayout::kFixed: return "fixed";
    case InputLayout::kSqueezed: return "squeezed";
    case InputLayout::kExpanded: return "expanded";
  }
  return "?";
}

InputLayout ParseInputLayout(const std::string& s) {
  if (s == "fixed") return InputLayout::kFixed;
  if (s == "squeezed") return InputLayout::kSqueezed;
  if (s == "expanded") return InputLayout::kExpanded;
  Throw(ErrorClass::kBadConfig, "unknown topology: " + s);
}

const char* SqueezeMethodName(SqueezeMethod m) {
  switch (m) {
    case SqueezeMethod::kFixedChannel: return "fixed_ch";
    case SqueezeMethod::kRandomChannel: return "random_ch";
    case SqueezeMethod::kChannelAverage: return "channel_avg";
    case SqueezeMethod::kCrossChannelAttention: return "cca";
  }
  return "?";
}

SqueezeMethod ParseSqueezeMethod(const std::string& s) {
  if (s == "fixed_ch") return SqueezeMethod::kFixedChannel;
  if (s == "random_ch") return SqueezeMethod::kRandomChannel;
  if (s == "channel_avg") return SqueezeMethod::kChannelAverage;
  if (s == "cca") return SqueezeMethod::kCrossChannelAttention;
  Throw(ErrorClass::kBadConfig, "unknown squeeze method: " + s);
}

namespace {

// Expects [channel, time, last] with any last axis (freq or bin).
void CheckSpectralDims(const FeatureTensor& spectral) {
  Require(spectral.Ndim() == 3 && spectral.AxisAt(0) == Axis::kChannel &&
              spectral.AxisAt(1) == Axis::kTime,
          ErrorClass::kShapeMismatch,
          "spectral tensor must be [channel, time, freq|bin], got " +
              spectral.ShapeString());
}

void CheckSfDims(const FeatureTensor& sf) {
  Require(sf.Ndim() == 2 && sf.AxisAt(0) == Axis::kTime,
          ErrorClass::kShapeMismatch,
          "spatial feature must be [time, freq|bin], got " + sf.ShapeString());
}

void CheckMatching(const FeatureTensor& spectral, const FeatureTensor& sf) {
  CheckSpectralDims(spectral);
  CheckSfDims(sf);
  Require(spectral.Extent(1) == sf.Extent(0) &&
              spectral.Extent(2) == sf.Extent(1),
          ErrorClass::kShapeMismatch,
          "spectral " + spectral.ShapeString() + " vs spatial " +
              sf.ShapeString());
}

}  // namespace

void FusedInput::Validate() const {
  data.Validate();
  switch (layout) {
    case InputLayout::kFixed:
      Require(data.Ndim() == 3 && data.Extent(0) == uint64_t(num_mics) + 1,
              ErrorClass::kShapeMismatch, "fixed layout expects [M+1, T, Fd]");
      break;
    case InputLayout::kSqueezed:
      Require(data.Ndim() == 3 && data.Extent(0) == 2,
              ErrorClass::kShapeMismatch, "squeezed layout expects [2, T, Fd]");
      break;
    case InputLayout::kExpanded:
      Require(data.Ndim() == 4 && data.Extent(0) == uint64_t(num_mics) &&
                  data.Extent(1) == 2,
              ErrorClass::kShapeMismatch,
              "expanded layout expects [M, 2, T, Fd]");
      break;
  }
}

FusedInput FuseFixed(const FeatureTensor& spectral, const FeatureTensor& sf) {
  CheckMatching(spectral, sf);
  const uint64_t m = spectral.Extent(0);
  const uint64_t t = spectral.Extent(1);
  const uint64_t fd = spectral.Extent(2);

  FusedInput out;
  out.layout = InputLayout::kFixed;
  out.num_mics = int(m);
  out.data = FeatureTensor(
      {{Axis::kChannel, m + 1}, {Axis::kTime, t}, sf.dims[1]});
  std::copy(spectral.data.begin(), spectral.data.end(),
            out.data.data.begin());
  std::copy(sf.data.begin(), sf.data.end(),
            out.data.data.begin() + size_t(m * t * fd));
  return out;
}

FeatureTensor ProjectSpatialFeature(const FeatureTensor& sf,
                                    const FilterBank& fb) {
  CheckSfDims(sf);
  Require(int(sf.Extent(1)) == fb.num_input_bins, ErrorClass::kShapeMismatch,
          "filter bank F does not match spatial feature");
  const int t_count = int(sf.Extent(0));
  const int f_in = fb.num_input_bins;
  const int f_out = fb.num_output_bins;
  FeatureTensor out(
      {{Axis::kTime, uint64_t(t_count)}, {Axis::kBin, uint64_t(f_out)}});
#pragma omp parallel for schedule(static)
  for (int t = 0; t < t_count; ++t) {
    const float* row = sf.data.data() + size_t(t) * f_in;
    std::vector<double> acc(f_out, 0.0);
    for (int i = 0; i < f_in; ++i) {
      if (row[i] == 0.0f) continue;
      const float* w = fb.weights.data() + size_t(i) * f_out;
      for (int j = 0; j < f_out; ++j)
        if (w[j] != 0.0f) acc[j] += double(row[i]) * w[j];
    }
    float* o = out.data.data() + size_t(t) * f_out;
    for (int j = 0; j < f_out; ++j) o[j] = float(acc[j]);
  }
  return out;
}

FeatureTensor SqueezeSpectral(const FeatureTensor& spectral,
                              SqueezeMethod method, uint64_t seed) {
  CheckSpectralDims(spectral);
  const int m_count = int(spectral.Extent(0));
  const int t_count = int(spectral.Extent(1));
  const int fd = int(spectral.Extent(2));
  Require(m_count >= 1, ErrorClass::kShapeMismatch, "need M >= 1");

  FeatureTensor out({{Axis::kTime, uint64_t(t_count)}, spectral.dims[2]});
  const size_t plane = size_t(t_count) * fd;

  auto copy_channel = [&](int m) {
    std::copy(spectral.data.begin() + size_t(m) * plane,
              spectral.data.begin() + size_t(m + 1) * plane,
              out.data.begin());
  };

  switch (method) {
    case SqueezeMethod::kFixedChannel:
      copy_channel(0);
      break;
    case SqueezeMethod::kRandomChannel: {
      SplitMix64 rng(seed);
      copy_channel(int(rng.Next() % uint64_t(m_count)));
      break;
    }
    case SqueezeMethod::kChannelAverage: {
#pragma omp parallel for schedule(static)
      for (size_t i = 0; i < plane; ++i) {
        double acc = 0.0;
        for (int m = 0; m < m_count; ++m)
          acc += spectral.data[size_t(m) * plane + i];
        out.data[i] = float(acc / m_count);
      }
      break;
    }
    case SqueezeMethod::kCrossChannelAttention: {
      // Per frame: tokens are the channels' Fd-vectors; query is their mean;
      // scaled dot-product scores -> softmax -> weighted sum. Identity
      // projections.
      const double scale = 1.0 / std::sqrt(double(fd));
#pragma omp parallel for schedule(static)
      for (int t = 0; t < t_count; ++t) {
        std::vector<double> q(fd, 0.0);
        for (int m = 0; m < m_count; ++m) {
          const float* x = spectral.data.data() + size_t(m) * plane +
                           size_t(t) * fd;
          for (int j = 0; j < fd; ++j) q[j] += x[j];
        }
        for (int j = 0; j < fd; ++j) q[j] /= m_count;

        std::vector<double> score(m_count, 0.0);
        double max_score = -1e300;
        for (int m = 0; m < m_count; ++m) {
          const float* x = spectral.data.data() + size_t(m) * plane +
                           size_t(t) * fd;
          double s = 0.0;
          for (int j = 0; j < fd; ++j) s += q[j] * x[j];
          score[m] = s * scale;
          if (score[m] > max_score) max_score = score[m];
        }
        double z = 0.0;
        for (int m = 0; m < m_count; ++m) {
          score[m] = std::exp(score[m] - max_score);
          z += score[m];
        }
        float* o = out.data.data() + size_t(t) * fd;
        for (int j = 0; j < fd; ++j) {
          double acc = 0.0;
          for (int m = 0; m < m_count; ++m)
            acc += score[m] *
                   spectral.data[size_t(m) * plane + size_t(t) * fd + j];
          o[j] = float(acc / z);
        }
      }
      break;
    }
  }
  return out;
}

FusedInput FuseSqueezed(const FeatureTensor& squeezed, const FeatureTensor& sf,
                        int num_mics) {
  CheckSfDims(squeezed);
  CheckSfDims(sf);
  Require(squeezed.dims == sf.dims, ErrorClass::kShapeMismatch,
          "squeezed " + squeezed.ShapeString() + " vs spatial " +
              sf.ShapeString());
  FusedInput out;
  out.layout = InputLayout::kSqueezed;
  out.num_mics = num_mics;
  out.data = FeatureTensor(
      {{Axis::kChannel, 2}, {Axis::kTime, sf.Extent(0)}, sf.dims[1]});
  std::copy(squeezed.data.begin(), squeezed.data.end(),
            out.data.data.begin());
  std::copy(sf.data.begin(), sf.data.end(),
            out.data.data.begin() + squeezed.data.size());
  return out;
}

FusedInput ExpandSpatial(const FeatureTensor& spectral,
                         const FeatureTensor& sf) {
  CheckMatching(spectral, sf);
  const uint64_t m = spectral.Extent(0);
  const uint64_t t = spectral.Extent(1);
  const uint64_t fd = spectral.Extent(2);

  FusedInput out;
  out.layout = InputLayout::kExpanded;
  out.num_mics = int(m);
  out.data = FeatureTensor({{Axis::kChannel, m},
                            {Axis::kFeatChannel, 2},
                            {Axis::kTime, t},
                            sf.dims[1]});
  const size_t plane = size_t(t * fd);
  for (uint64_t mi = 0; mi < m; ++mi) {
    std::copy(spectral.data.begin() + size_t(mi) * plane,
              spectral.data.begin() + size_t(mi + 1) * plane,
              out.data.data.begin() + size_t(2 * mi) * plane);
    std::copy(sf.data.begin(), sf.data.end(),
              out.data.data.begin() + size_t(2 * mi + 1) * plane);
  }
  return out;
}

}  // namespace spatialemb

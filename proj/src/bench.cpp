// src/bench.cpp

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

#include "spatialemb/bench.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>

#include "spatialemb/rng.hpp"

namespace spatialemb {

namespace {

FusedInput SyntheticInput(const EmbeddingSpec& spec, int num_frames,
                          uint64_t seed) {
  SplitMix64 rng(seed);
  FusedInput in;
  in.layout = spec.topology;
  in.num_mics = spec.num_mics;
  const uint64_t t = uint64_t(num_frames);
  const uint64_t fd = uint64_t(spec.feature_dim);
  switch (spec.topology) {
    case InputLayout::kFixed:
      in.data = FeatureTensor({{Axis::kChannel, uint64_t(spec.num_mics) + 1},
                               {Axis::kTime, t},
                               {Axis::kFreq, fd}});
      break;
    case InputLayout::kSqueezed:
      in.data = FeatureTensor(
          {{Axis::kChannel, 2}, {Axis::kTime, t}, {Axis::kFreq, fd}});
      break;
    case InputLayout::kExpanded:
      in.data = FeatureTensor({{Axis::kChannel, uint64_t(spec.num_mics)},
                               {Axis::kFeatChannel, 2},
                               {Axis::kTime, t},
                               {Axis::kFreq, fd}});
      break;
  }
  for (float& v : in.data.data) v = float(rng.NextUniform(-1.0, 1.0));
  return in;
}

double Percentile(std::vector<double> sorted, double q) {
  size_t idx = size_t(std::lround(q * double(sorted.size() - 1)));
  return sorted[idx];
}

}  // namespace

CostReport Measure(const EmbeddingSpec& spec, const MeasureOptions& opts) {
  Require(opts.repeats >= 3, ErrorClass::kBadConfig,
          "repeats must be >= 3, got " + std::to_string(opts.repeats));
  Require(opts.batch_seconds > 0, ErrorClass::kBadConfig,
          "batch_seconds must be positive");
  Require(opts.threads >= 1, ErrorClass::kBadConfig, "threads must be >= 1");
  spec.Validate();

  const int num_frames = int(std::lround(opts.batch_seconds * 100.0));
  CostReport rep = CountFlops(spec, num_frames);
  rep.batch_seconds = opts.batch_seconds;
  rep.repeats = opts.repeats;
  rep.threads = opts.threads;

  const int saved_threads = omp_get_max_threads();
  omp_set_num_threads(opts.threads);
  try {
    WeightStore weights = InitWeights(spec, opts.seed);
    FusedInput input = SyntheticInput(spec, num_frames, opts.seed + 1);

    for (int i = 0; i < opts.warmups; ++i)
      (void)EmbedForward(spec, weights, input);

    alloc_tracker::Enable();
    uint64_t peak = 0;
    for (int r = 0; r < opts.repeats; ++r) {
      alloc_tracker::ResetPeak();
      auto t0 = std::chrono::steady_clock::now();
      (void)EmbedForward(spec, weights, input);
      auto t1 = std::chrono::steady_clock::now();
      rep.latencies_ms.push_back(
          std::chrono::duration<double, std::milli>(t1 - t0).count());
      peak = std::max(peak, alloc_tracker::PeakBytes());
    }
    alloc_tracker::Disable();
    rep.peak_bytes = peak;

    std::vector<double> sorted = rep.latencies_ms;
    std::sort(sorted.begin(), sorted.end());
    rep.latency_ms_median = Percentile(sorted, 0.5);
    rep.latency_ms_p10 = Percentile(sorted, 0.1);
    rep.latency_ms_p90 = Percentile(sorted, 0.9);
  } catch (const std::bad_alloc&) {
    alloc_tracker::Disable();
    rep.status = "oom";
  }
  omp_set_num_threads(saved_threads);
  return rep;
}

void WriteCsvHeader(std::ostream& os) {
  os << "name,structure,topology,fusion,feature_dim,c1,c2,c3,mics,"
        "batch_seconds,repeats,threads,flops_total,latency_ms_median,"
        "latency_ms_p10,latency_ms_p90,peak_bytes,status\n";
}

void WriteCsvRow(std::ostream& os, const EmbeddingSpec& spec,
                 const CostReport& report) {
  os << report.name << ',' << StructureName(spec.structure) << ','
     << InputLayoutName(spec.topology) << ','
     << ChannelFusionName(spec.fusion) << ',' << spec.feature_dim << ','
     << spec.out_channels[0] << ',' << spec.out_channels[1] << ','
     << spec.out_channels[2] << ',' << spec.num_mics << ','
     << report.batch_seconds << ',' << report.repeats << ','
     << report.threads << ',' << report.flops_total << ','
     << report.latency_ms_median << ',' << report.latency_ms_p10 << ','
     << report.latency_ms_p90 << ',' << report.peak_bytes << ','
     << report.status << '\n';
}

}  // namespace spatialemb

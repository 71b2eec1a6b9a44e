// include/spatialemb/bench.hpp

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

#ifndef SPATIALEMB_BENCH_HPP_
#define SPATIALEMB_BENCH_HPP_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "spatialemb/flops.hpp"

namespace spatialemb {

// Heap high-water mark around a measured region. Backed by global
// operator new/delete replacements; tracking is off (near-zero overhead)
// until Enable() is called.
namespace alloc_tracker {
void Enable();
void Disable();
void ResetPeak();
uint64_t PeakBytes();
uint64_t CurrentBytes();
}  // namespace alloc_tracker

struct MeasureOptions {
  double batch_seconds = 60.0;  // synthetic workload: T = 100 * seconds
  int repeats = 10;             // must be >= 3
  int warmups = 2;
  int threads = 1;  // measurement pins to one worker unless raised
  uint64_t seed = 0;
};

// Builds a synthetic input for `spec`, runs forward `repeats` times after
// warmups, and reports latency percentiles, analytic FLOPs and the peak
// allocation mark. Out-of-memory is reported via status == "oom", not
// by crashing.
CostReport Measure(const EmbeddingSpec& spec, const MeasureOptions& opts);

// CSV report. Fixed column order:
//   name,structure,topology,fusion,feature_dim,c1,c2,c3,mics,batch_seconds,
//   repeats,threads,flops_total,latency_ms_median,latency_ms_p10,
//   latency_ms_p90,peak_bytes,status
void WriteCsvHeader(std::ostream& os);
void WriteCsvRow(std::ostream& os, const EmbeddingSpec& spec,
                 const CostReport& report);

}  // namespace spatialemb

#endif  // SPATIALEMB_BENCH_HPP_

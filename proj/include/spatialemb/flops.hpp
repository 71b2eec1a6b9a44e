// include/spatialemb/flops.hpp

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

#ifndef SPATIALEMB_FLOPS_HPP_
#define SPATIALEMB_FLOPS_HPP_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "spatialemb/embedding.hpp"

namespace spatialemb {

// Accumulates multiply/add counts inside the reference kernels so analytic
// per-layer formulas can be checked against an executed count.
struct FlopMeter {
  uint64_t flops = 0;
  void Add(uint64_t n) { flops += n; }
};

// FLOP convention (one multiply or one add counts 1, so a multiply-
// accumulate counts 2; bias additions and divisions by constants are free):
//   conv2d:        2 * cin * cout * kt * kf * T' * F'   per branch
//   depthwise:     2 * c * kt * kf * T' * F'            per branch
//   linear:        2 * in * out                         per position
//   gru layer:     3 * 2 * (in + H) * H                 per step per freq
//   tac:           two C->C/2 linears per branch position, ReLU at 1/elem,
//                  plus (M-1)*C/2 adds per position for the average
//   dac:           (M-1) * C/2 * T * F adds
//   avg over M:    (M-1) * C * T * F adds
//   double_swish:  1 per element
//   gelu:          1 per element
//   relu:          1 per element
//   residual add:  1 per element
//   layernorm:     7*C + 4 per normalized position
// GRU gate activations and Hadamard products are not charged.

struct CostReport {
  std::string name;
  uint64_t flops_total = 0;
  std::vector<std::pair<std::string, uint64_t>> per_layer;
  double latency_ms_median = 0.0;
  double latency_ms_p10 = 0.0;
  double latency_ms_p90 = 0.0;
  std::vector<double> latencies_ms;  // raw per-run values
  uint64_t peak_bytes = 0;
  double batch_seconds = 0.0;
  int repeats = 0;
  int threads = 1;
  std::string status = "ok";  // "ok" or "oom"
};

// Analytic FLOP count for one forward pass of `spec` over `num_frames`
// input frames (frequency extent comes from spec.feature_dim).
CostReport CountFlops(const EmbeddingSpec& spec, int num_frames);

}  // namespace spatialemb

#endif  // SPATIALEMB_FLOPS_HPP_

// include/spatialemb/wave.hpp

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

#ifndef SPATIALEMB_WAVE_HPP_
#define SPATIALEMB_WAVE_HPP_

#include <cstdint>
#include <vector>

#include "spatialemb/common.hpp"

namespace spatialemb {

// M-channel time-domain audio, samples in [-1, 1], one row per channel.
struct MultiChannelWave {
  int num_channels = 0;
  int64_t num_samples = 0;
  int sample_rate_hz = 0;
  std::vector<float> samples;  // [num_channels, num_samples], row-major

  float* Channel(int m) { return samples.data() + int64_t(m) * num_samples; }
  const float* Channel(int m) const {
    return samples.data() + int64_t(m) * num_samples;
  }

  // Checks channel count, lengths, sample-rate and the [-1, 1] range.
  void Validate() const;
};

}  // namespace spatialemb

#endif  // SPATIALEMB_WAVE_HPP_

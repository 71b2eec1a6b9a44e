// include/spatialemb/spatial.hpp

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

#ifndef SPATIALEMB_SPATIAL_HPP_
#define SPATIALEMB_SPATIAL_HPP_

#include <complex>
#include <vector>

#include "spatialemb/stft.hpp"
#include "spatialemb/tensor.hpp"

namespace spatialemb {

// K complex STFT frames per channel cut from a solo segment of the target
// speaker; used as the convolution kernel that carries the target's RIR.
struct SoloKernel {
  int num_channels = 0;  // M
  int num_frames = 0;    // K
  int num_bins = 0;      // F
  std::vector<std::complex<float>> frames;  // [M, K, F]

  const std::complex<float>* Frame(int m, int k) const {
    return frames.data() +
           (size_t(m) * num_frames + size_t(k)) * size_t(num_bins);
  }
};

// Phase of the kernel-convolved spectrogram, radians in (-pi, pi]. [M, T, F].
struct PhaseTensor {
  int num_channels = 0;
  int num_frames = 0;
  int num_bins = 0;
  std::vector<float> values;  // [M, T, F]

  float At(int m, int t, int f) const {
    return values[(size_t(m) * num_frames + t) * num_bins + f];
  }
  float& At(int m, int t, int f) {
    return values[(size_t(m) * num_frames + t) * num_bins + f];
  }
};

constexpr int kDefaultKernelFrames = 10;  // 0.1 s at 10 ms hop

SoloKernel ExtractKernel(const Spectrogram& solo_spec, int start_frame,
                         int num_frames = kDefaultKernelFrames);

// RP[m,t,f] = phase( sum_k Y[m,t-k,f] * conj(R[m,k,f]) ), with zero history
// for t-k < 0 and phase(0) = 0.
PhaseTensor RirPhase(const Spectrogram& mix, const SoloKernel& kernel);

// SF[t,f] = cos(RP[m1,t,f] - RP[m2,t,f]). [T, F].
FeatureTensor PairwiseSpatialFeature(const PhaseTensor& rp, int m1, int m2);

// All-pairs spatial feature:
//   SF[t,f] = 1/(M(M-1)) * sum_i sum_{j!=i} cos(RP[i]-RP[j]).
// Computed per bin as (|sum_m exp(i*RP_m)|^2 - M) / (M(M-1)), which is the
// same sum without the O(M^2) pair loop.
FeatureTensor AllPairsSpatialFeature(const PhaseTensor& rp);

}  // namespace spatialemb

#endif  // SPATIALEMB_SPATIAL_HPP_

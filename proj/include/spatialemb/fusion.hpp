// include/spatialemb/fusion.hpp

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

#ifndef SPATIALEMB_FUSION_HPP_
#define SPATIALEMB_FUSION_HPP_

#include <cstdint>
#include <string>

#include "spatialemb/stft.hpp"
#include "spatialemb/tensor.hpp"

namespace spatialemb {

enum class InputLayout {
  kFixed,     // [M+1, T, Fd]: M spectral channels + 1 spatial plane
  kSqueezed,  // [2, T, Fd]: squeezed spectral + spatial plane
  kExpanded,  // [M, 2, T, Fd]: per channel (spectral, spatial) pair
};

const char* InputLayoutName(InputLayout l);
InputLayout ParseInputLayout(const std::string& s);

// A fused network input together with its declared layout.
struct FusedInput {
  InputLayout layout = InputLayout::kFixed;
  FeatureTensor data;

  // Microphone channels represented (M); for kFixed the tensor holds M+1.
  int num_mics = 0;
  void Validate() const;
};

// Fixed topology: concatenate spectral [M,T,Fd] and spatial [T,Fd] on the
// channel axis -> [M+1, T, Fd].
FusedInput FuseFixed(const FeatureTensor& spectral, const FeatureTensor& sf);

// Applies the filter bank matrix to a spatial feature, no logarithm.
FeatureTensor ProjectSpatialFeature(const FeatureTensor& sf,
                                    const FilterBank& fb);

enum class SqueezeMethod {
  kFixedChannel,   // reference channel 0
  kRandomChannel,  // seeded draw
  kChannelAverage,
  kCrossChannelAttention,
};

const char* SqueezeMethodName(SqueezeMethod m);
SqueezeMethod ParseSqueezeMethod(const std::string& s);

// Collapses [M,T,Fd] spectral features to [T,Fd]. kRandomChannel draws the
// channel from SplitMix64(seed); kCrossChannelAttention runs per-frame
// scaled dot-product attention with the channel mean as query and identity
// projections.
FeatureTensor SqueezeSpectral(const FeatureTensor& spectral,
                              SqueezeMethod method, uint64_t seed);

// Stacks a squeezed spectral plane with the spatial plane -> [2, T, Fd].
FusedInput FuseSqueezed(const FeatureTensor& squeezed, const FeatureTensor& sf,
                        int num_mics);

// Spatial feature expansion: output[m,0] = spectral[m], output[m,1] = sf.
FusedInput ExpandSpatial(const FeatureTensor& spectral,
                         const FeatureTensor& sf);

}  // namespace spatialemb

#endif  // SPATIALEMB_FUSION_HPP_

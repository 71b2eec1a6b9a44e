// include/spatialemb/ref.hpp

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

#ifndef SPATIALEMB_REF_HPP_
#define SPATIALEMB_REF_HPP_

#include <complex>
#include <vector>

#include "spatialemb/embedding.hpp"
#include "spatialemb/flops.hpp"
#include "spatialemb/spatial.hpp"

// Serial reference implementations. Plain loops, double accumulation,
// no OpenMP, written independently of the production kernels. They back the
// test oracles, the instrumented FLOP counter, and the serial side of the
// kernel benchmark. Keep them dumb.
namespace spatialemb::ref {

// O(n^2) DFT: out[k] = sum_j in[j] * exp(-2*pi*i*j*k/n).
std::vector<std::complex<double>> NaiveDft(
    const std::vector<std::complex<double>>& in);

// Per-bin k-loop evaluation of the kernel convolution phase.
PhaseTensor RirPhaseNaive(const Spectrogram& mix, const SoloKernel& kernel);

// Ordered-pair double loop of the all-pairs spatial feature.
FeatureTensor AllPairsNaive(const PhaseTensor& rp);

// Per-frame softmax attention squeeze, scalar loops.
FeatureTensor CcaSqueezeNaive(const FeatureTensor& spectral);

// Layer kernels. `fm` may be null; when set it is charged per the FLOP
// convention in flops.hpp.
void Conv2dNaive(const ActTensor& x, const float* w, const float* b, int cout,
                 int kt, int kf, int st, int sf, int pt, int pf, ActTensor* y,
                 FlopMeter* fm = nullptr);
void DepthwiseConv2dNaive(const ActTensor& x, const float* w, const float* b,
                          int kt, int kf, int pt, int pf, ActTensor* y,
                          FlopMeter* fm = nullptr);
void DoubleSwishNaive(ActTensor* x, FlopMeter* fm = nullptr);
void ConvNextBlockNaive(const ActTensor& x, const ConvNextWeights& w,
                        ActTensor* y, FlopMeter* fm = nullptr);
void ChannelLinearNaive(const ActTensor& x, const float* w, const float* b,
                        int out_channels, ActTensor* y,
                        FlopMeter* fm = nullptr);
void GruStackNaive(const ActTensor& x, const GruStackWeights& w, ActTensor* y,
                   FlopMeter* fm = nullptr);
void TacNaive(const ActTensor& x, const float* a_w, const float* a_b,
              const float* b_w, const float* b_b, ActTensor* y,
              FlopMeter* fm = nullptr);
void DacNaive(const ActTensor& x, ActTensor* y, FlopMeter* fm = nullptr);
void AverageOverBranchesNaive(const ActTensor& x, ActTensor* y,
                              FlopMeter* fm = nullptr);
void HeadLinearNaive(const ActTensor& x, const float* w, const float* b,
                     int out_dim, FeatureTensor* out, FlopMeter* fm = nullptr);

// Full serial forward over the same layer plan as EmbedForward.
FeatureTensor ForwardNaive(const EmbeddingSpec& spec, const WeightStore& w,
                           const FusedInput& input, FlopMeter* fm = nullptr);

}  // namespace spatialemb::ref

#endif  // SPATIALEMB_REF_HPP_

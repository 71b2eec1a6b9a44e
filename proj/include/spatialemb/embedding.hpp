// include/spatialemb/embedding.hpp

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

#ifndef SPATIALEMB_EMBEDDING_HPP_
#define SPATIALEMB_EMBEDDING_HPP_

#include <array>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "spatialemb/fusion.hpp"
#include "spatialemb/tensor.hpp"

namespace spatialemb {

// ---------------------------------------------------------------------------
// Activations
// ---------------------------------------------------------------------------

// 4D activation [M, C, T, F], row-major. M is the per-microphone branch axis
// of the expanded topology; fixed/squeezed paths run with M == 1.
struct ActTensor {
  int m = 1, c = 0, t = 0, f = 0;
  std::vector<float> v;

  ActTensor() = default;
  ActTensor(int m_, int c_, int t_, int f_)
      : m(m_), c(c_), t(t_), f(f_),
        v(size_t(m_) * c_ * size_t(t_) * f_, 0.0f) {}

  size_t Idx(int mi, int ci, int ti, int fi) const {
    return ((size_t(mi) * c + ci) * t + ti) * f + fi;
  }
  float At(int mi, int ci, int ti, int fi) const {
    return v[Idx(mi, ci, ti, fi)];
  }
  float& At(int mi, int ci, int ti, int fi) { return v[Idx(mi, ci, ti, fi)]; }

  // Pointer to the contiguous [T, F] plane of (branch mi, channel ci).
  float* Plane(int mi, int ci) { return v.data() + Idx(mi, ci, 0, 0); }
  const float* Plane(int mi, int ci) const {
    return v.data() + Idx(mi, ci, 0, 0);
  }
  size_t NumEl() const { return v.size(); }
};

// ---------------------------------------------------------------------------
// Layer kernels (OpenMP-parallel production path)
// ---------------------------------------------------------------------------

inline int ConvOutExtent(int in, int k, int stride, int pad) {
  return (in + 2 * pad - k) / stride + 1;
}

// Cross-correlation conv2d over the (T, F) plane, shared across branches:
// y[m,co,to,fo] = b[co] + sum_{ci,i,j} w[co,ci,i,j] * x[m,ci,to*st-pt+i,
// fo*sf-pf+j], out-of-range taps read as zero. w is [cout, cin, kt, kf].
void Conv2dForward(const ActTensor& x, const float* w, const float* b,
                   int cout, int kt, int kf, int st, int sf, int pt, int pf,
                   ActTensor* y);

// Depthwise variant: w is [c, kt, kf], one filter per channel.
void DepthwiseConv2dForward(const ActTensor& x, const float* w, const float* b,
                            int kt, int kf, int pt, int pf, ActTensor* y);

double DoubleSwish(double x);  // s(s(x)), s(x) = x * sigmoid(x); exact
void DoubleSwishInplace(ActTensor* x);

struct ConvNextWeights {
  int channels = 0;
  const float* dw_w = nullptr;   // [C, 7, 7]
  const float* dw_b = nullptr;   // [C]
  const float* ln_gamma = nullptr;  // [C]
  const float* ln_beta = nullptr;   // [C]
  const float* pw1_w = nullptr;  // [4C, C]
  const float* pw1_b = nullptr;  // [4C]
  const float* pw2_w = nullptr;  // [C, 4C]
  const float* pw2_b = nullptr;  // [4C] -> [C]
};

// Depthwise 7x7 (pad 3) -> LayerNorm over channels per (t,f), eps 1e-6 ->
// pointwise C->4C -> GeLU -> pointwise 4C->C -> residual add. Shape kept.
void ConvNextBlockForward(const ActTensor& x, const ConvNextWeights& w,
                          ActTensor* y);

// Per-position channel linear: y[m,o,t,f] = b[o] + sum_c w[o,c]*x[m,c,t,f].
void ChannelLinearForward(const ActTensor& x, const float* w, const float* b,
                          int out_channels, ActTensor* y);

struct GruLayerWeights {
  const float* w_ih = nullptr;  // [3H, in], gate order r, z, n
  const float* w_hh = nullptr;  // [3H, H]
  const float* b_ih = nullptr;  // [3H]
  const float* b_hh = nullptr;  // [3H]
};

// Linear (Cin -> H at every (t,f)) followed by `layers` unidirectional GRU
// layers running along time, frequency treated as the batch axis. Zero
// initial state.
struct GruStackWeights {
  int hidden = 0;
  const float* lin_w = nullptr;  // [H, Cin]
  const float* lin_b = nullptr;  // [H]
  std::vector<GruLayerWeights> layers;
};

void GruStackForward(const ActTensor& x, const GruStackWeights& w,
                     ActTensor* y);

// Transform-average-concatenate. a/b map C -> C/2 at each (m,t,f):
// y_m = [ReLU(A x_m); mean_m ReLU(B x_m)]. C must be even.
void TacForward(const ActTensor& x, const float* a_w, const float* a_b,
                const float* b_w, const float* b_b, ActTensor* y);

// Divide-average-concatenate, parameter-free: first C/2 channels copied,
// last C/2 replaced by their mean over branches. C must be even.
void DacForward(const ActTensor& x, ActTensor* y);

// Mean over the branch axis; output has m == 1.
void AverageOverBranches(const ActTensor& x, ActTensor* y);

// Flattens (C, F) at each frame and applies a linear map to `out_dim`.
// w is [out_dim, C*F]. Input must have m == 1. Output is [T, out_dim].
void HeadLinearForward(const ActTensor& x, const float* w, const float* b,
                       int out_dim, FeatureTensor* out);

// ---------------------------------------------------------------------------
// Embedding specification and plans
// ---------------------------------------------------------------------------

enum class Structure { kConv2d, kConvNext, kGruConv2d };
const char* StructureName(Structure s);
Structure ParseStructure(const std::string& s);

enum class ChannelFusion { kNone, kEarlyAvg, kLateAvg, kTac, kDac };
const char* ChannelFusionName(ChannelFusion f);
ChannelFusion ParseChannelFusion(const std::string& s);

struct EmbeddingSpec {
  Structure structure = Structure::kConv2d;
  std::array<int, 3> out_channels = {16, 32, 128};  // C1, C2, C3
  int num_blocks = 1;   // ConvNext blocks per subsampled stage / GRU layers
  int feature_dim = 201;  // Fd at the input
  InputLayout topology = InputLayout::kFixed;
  ChannelFusion fusion = ChannelFusion::kNone;
  int final_dim = 256;  // D
  int num_mics = 8;     // M
  // Table-1 "sub" version: the entry layer subsamples frequency (stride 1x2)
  // instead of the 3x1 conv.
  bool freq_subsample_entry = false;

  // Channel count seen by the entry layer: M+1 (fixed), 2 (squeezed), or 2
  // per branch (expanded).
  int InputChannels() const;
  void Validate() const;
};

enum class LayerOp {
  kConv,       // conv (+ optional DoubleSwish)
  kConvNext,
  kGruStack,   // entry linear + GRU layers
  kTac,
  kDac,
  kAvgOverM,
  kHead,
};

struct LayerDesc {
  LayerOp op = LayerOp::kConv;
  std::string path;  // weight prefix; empty for parameter-free layers
  int cin = 0, cout = 0;
  int kt = 0, kf = 0, st = 1, sf = 1, pt = 0, pf = 0;
  bool double_swish = false;
  int gru_layers = 0;
  int freq_in = 0, freq_out = 0;  // frequency extent through the layer
};

struct LayerPlan {
  std::vector<LayerDesc> layers;
  int head_in_features = 0;  // C3 * F_final
  int final_freq = 0;
};

// Expands an EmbeddingSpec into the ordered layer list (the structure
// string). Frequency extents are resolved from spec.feature_dim.
LayerPlan BuildLayerPlan(const EmbeddingSpec& spec);

// ---------------------------------------------------------------------------
// Weights
// ---------------------------------------------------------------------------

struct WeightStore {
  struct Param {
    std::string path;
    std::vector<int> shape;
    std::vector<float> values;
  };
  uint64_t seed = 0;
  std::vector<Param> params;  // in draw order
  std::unordered_map<std::string, size_t> index;

  const Param& Get(const std::string& path) const;
  const float* Data(const std::string& path) const {
    return Get(path).values.data();
  }
  size_t TotalParameters() const;
  void Add(const std::string& path, std::vector<int> shape,
           std::vector<float> values);
};

// Draws every parameter i.i.d. uniform(-0.1, 0.1) from one SplitMix64
// stream, consumed in plan order; within a layer weights come before biases.
WeightStore InitWeights(const EmbeddingSpec& spec, uint64_t seed);

// Serialization: <base>.sefw holds one SEF1 record per parameter, in draw
// order; <base>.manifest lists "path = d0xd1x..." lines in the same order.
void SaveWeights(const std::string& base_path, const WeightStore& w);
WeightStore LoadWeights(const std::string& base_path);

// ---------------------------------------------------------------------------
// Forward
// ---------------------------------------------------------------------------

struct ForwardTrace {
  struct Entry {
    std::string layer;
    int m = 0, c = 0, t = 0, f = 0;
  };
  std::vector<Entry> entries;
};

// Runs the layer plan over a fused input. Output is [time, bin] with
// bin extent final_dim. Checks input layout against spec.topology.
FeatureTensor EmbedForward(const EmbeddingSpec& spec, const WeightStore& w,
                           const FusedInput& input,
                           ForwardTrace* trace = nullptr);

}  // namespace spatialemb

#endif  // SPATIALEMB_EMBEDDING_HPP_

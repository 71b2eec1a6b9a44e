// src/flops.cpp

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

#include "spatialemb/flops.hpp"

#include <sstream>

namespace spatialemb {

// Analytic counterpart of the instrumented reference kernels; the two are
// kept in lockstep (tested for exact equality on small configurations).
CostReport CountFlops(const EmbeddingSpec& spec, int num_frames) {
  spec.Validate();
  Require(num_frames >= 1, ErrorClass::kSpecMismatch, "num_frames must be >= 1");
  LayerPlan plan = BuildLayerPlan(spec);

  CostReport rep;
  {
    std::ostringstream name;
    name << StructureName(spec.structure) << "[" << spec.out_channels[0]
         << "x" << spec.out_channels[1] << "x" << spec.out_channels[2] << "]/"
         << InputLayoutName(spec.topology) << "/"
         << ChannelFusionName(spec.fusion);
    rep.name = name.str();
  }

  uint64_t branches =
      spec.topology == InputLayout::kExpanded ? uint64_t(spec.num_mics) : 1;
  uint64_t t_cur = uint64_t(num_frames);

  for (const LayerDesc& d : plan.layers) {
    uint64_t layer_flops = 0;
    std::string name = d.path.empty() ? "avg" : d.path;
    switch (d.op) {
      case LayerOp::kConv: {
        uint64_t t_out = uint64_t(ConvOutExtent(int(t_cur), d.kt, d.st, d.pt));
        uint64_t f_out = uint64_t(d.freq_out);
        layer_flops = branches * 2 * uint64_t(d.cin) * d.cout * d.kt * d.kf *
                      t_out * f_out;
        if (d.double_swish)
          layer_flops += branches * uint64_t(d.cout) * t_out * f_out;
        t_cur = t_out;
        break;
      }
      case LayerOp::kConvNext: {
        const uint64_t c = uint64_t(d.cin);
        const uint64_t pos = t_cur * uint64_t(d.freq_in);
        uint64_t per_branch = 0;
        per_branch += 2 * c * 7 * 7 * pos;        // depthwise 7x7
        per_branch += (7 * c + 4) * pos;          // layernorm
        per_branch += 2 * c * (4 * c) * pos;      // pw1
        per_branch += 4 * c * pos;                // gelu
        per_branch += 2 * (4 * c) * c * pos;      // pw2
        per_branch += c * pos;                    // residual
        layer_flops = branches * per_branch;
        break;
      }
      case LayerOp::kGruStack: {
        const uint64_t h = uint64_t(d.cout);
        const uint64_t pos = t_cur * uint64_t(d.freq_in);
        uint64_t per_branch = 2 * uint64_t(d.cin) * h * pos;  // entry linear
        // each layer's input size equals the hidden size
        per_branch += uint64_t(d.gru_layers) * 3 * 2 * (h + h) * h * pos;
        layer_flops = branches * per_branch;
        break;
      }
      case LayerOp::kTac: {
        const uint64_t c = uint64_t(d.cin);
        const uint64_t pos = t_cur * uint64_t(d.freq_in);
        // two C -> C/2 linears and a ReLU per branch, then the average of
        // the second half across branches
        layer_flops = branches * (2 * c * (c / 2) * 2 + c) * pos +
                      (branches - 1) * (c / 2) * pos;
        break;
      }
      case LayerOp::kDac: {
        layer_flops = (branches - 1) * uint64_t(d.cin / 2) * t_cur *
                      uint64_t(d.freq_in);
        break;
      }
      case LayerOp::kAvgOverM: {
        layer_flops =
            (branches - 1) * uint64_t(d.cin) * t_cur * uint64_t(d.freq_in);
        branches = 1;
        break;
      }
      case LayerOp::kHead: {
        layer_flops = 2 * uint64_t(d.cin) * uint64_t(d.freq_in) *
                      uint64_t(d.cout) * t_cur;
        name = "head";
        break;
      }
    }
    rep.per_layer.emplace_back(name, layer_flops);
    rep.flops_total += layer_flops;
  }
  return rep;
}

}  // namespace spatialemb

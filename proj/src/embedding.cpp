// src/embedding.cpp

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

#include "spatialemb/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "spatialemb/rng.hpp"
#include "spatialemb/sef_io.hpp"

namespace spatialemb {

// ---------------------------------------------------------------------------
// Kernels
// ---------------------------------------------------------------------------

void Conv2dForward(const ActTensor& x, const float* w, const float* b,
                   int cout, int kt, int kf, int st, int sf, int pt, int pf,
                   ActTensor* y) {
  const int to_count = ConvOutExtent(x.t, kt, st, pt);
  const int fo_count = ConvOutExtent(x.f, kf, sf, pf);
  Require(to_count >= 1 && fo_count >= 1, ErrorClass::kShapeMismatch,
          "conv output would be empty");
  *y = ActTensor(x.m, cout, to_count, fo_count);

  const int m_count = x.m, cin = x.c, t_in = x.t, f_in = x.f;
#pragma omp parallel for collapse(2) schedule(static)
  for (int mi = 0; mi < m_count; ++mi) {
    for (int co = 0; co < cout; ++co) {
      float* plane = y->Plane(mi, co);
      const float bias = b ? b[co] : 0.0f;
      for (int to = 0; to < to_count; ++to) {
        float* orow = plane + size_t(to) * fo_count;
        for (int fo = 0; fo < fo_count; ++fo) orow[fo] = bias;
        for (int ci = 0; ci < cin; ++ci) {
          const float* iplane = x.Plane(mi, ci);
          for (int ikt = 0; ikt < kt; ++ikt) {
            const int tin = to * st - pt + ikt;
            if (tin < 0 || tin >= t_in) continue;
            const float* irow = iplane + size_t(tin) * f_in;
            const float* wrow =
                w + ((size_t(co) * cin + ci) * kt + ikt) * kf;
            for (int ikf = 0; ikf < kf; ++ikf) {
              const float wv = wrow[ikf];
              if (wv == 0.0f) continue;
              const int off = ikf - pf;
              int fo_lo = 0;
              if (off < 0) fo_lo = (-off + sf - 1) / sf;
              int fo_hi = fo_count;
              if (off + (fo_count - 1) * sf >= f_in)
                fo_hi = (f_in - 1 - off) / sf + 1;
              if (fo_hi > fo_count) fo_hi = fo_count;
              const float* in_base = irow + off;
              if (sf == 1) {
                for (int fo = fo_lo; fo < fo_hi; ++fo)
                  orow[fo] += wv * in_base[fo];
              } else {
                for (int fo = fo_lo; fo < fo_hi; ++fo)
                  orow[fo] += wv * in_base[size_t(fo) * sf];
              }
            }
          }
        }
      }
    }
  }
}

void DepthwiseConv2dForward(const ActTensor& x, const float* w, const float* b,
                            int kt, int kf, int pt, int pf, ActTensor* y) {
  const int to_count = ConvOutExtent(x.t, kt, 1, pt);
  const int fo_count = ConvOutExtent(x.f, kf, 1, pf);
  *y = ActTensor(x.m, x.c, to_count, fo_count);
  const int m_count = x.m, c_count = x.c, t_in = x.t, f_in = x.f;
#pragma omp parallel for collapse(2) schedule(static)
  for (int mi = 0; mi < m_count; ++mi) {
    for (int ci = 0; ci < c_count; ++ci) {
      const float* iplane = x.Plane(mi, ci);
      float* plane = y->Plane(mi, ci);
      const float bias = b ? b[ci] : 0.0f;
      const float* wch = w + size_t(ci) * kt * kf;
      for (int to = 0; to < to_count; ++to) {
        float* orow = plane + size_t(to) * fo_count;
        for (int fo = 0; fo < fo_count; ++fo) orow[fo] = bias;
        for (int ikt = 0; ikt < kt; ++ikt) {
          const int tin = to - pt + ikt;
          if (tin < 0 || tin >= t_in) continue;
          const float* irow = iplane + size_t(tin) * f_in;
          for (int ikf = 0; ikf < kf; ++ikf) {
            const float wv = wch[ikt * kf + ikf];
            const int off = ikf - pf;
            int fo_lo = off < 0 ? -off : 0;
            int fo_hi = std::min(fo_count, f_in - off);
            for (int fo = fo_lo; fo < fo_hi; ++fo)
              orow[fo] += wv * irow[fo + off];
          }
        }
      }
    }
  }
}

double DoubleSwish(double x) {
  auto swish = [](double v) { return v / (1.0 + std::exp(-v)); };
  return swish(swish(x));
}

void DoubleSwishInplace(ActTensor* x) {
  const size_t n = x->v.size();
  float* p = x->v.data();
#pragma omp parallel for schedule(static)
  for (size_t i = 0; i < n; ++i) p[i] = float(DoubleSwish(p[i]));
}

namespace {

inline float Gelu(float x) {
  return float(0.5 * double(x) *
               (1.0 + std::erf(double(x) * 0.70710678118654752440)));
}

// out[m,o,:,:] = bias[o] + sum_c w[o,c] * in[m,c,:,:] over the contiguous
// (T*F) plane; the shared inner pattern of every pointwise linear layer.
void PointwiseLinear(const ActTensor& x, const float* w, const float* b,
                     int out_channels, ActTensor* y) {
  *y = ActTensor(x.m, out_channels, x.t, x.f);
  const size_t plane = size_t(x.t) * x.f;
  const int m_count = x.m, cin = x.c;
#pragma omp parallel for collapse(2) schedule(static)
  for (int mi = 0; mi < m_count; ++mi) {
    for (int o = 0; o < out_channels; ++o) {
      float* orow = y->Plane(mi, o);
      const float bias = b ? b[o] : 0.0f;
      for (size_t i = 0; i < plane; ++i) orow[i] = bias;
      const float* wrow = w + size_t(o) * cin;
      for (int ci = 0; ci < cin; ++ci) {
        const float wv = wrow[ci];
        if (wv == 0.0f) continue;
        const float* irow = x.Plane(mi, ci);
        for (size_t i = 0; i < plane; ++i) orow[i] += wv * irow[i];
      }
    }
  }
}

}  // namespace

void ChannelLinearForward(const ActTensor& x, const float* w, const float* b,
                          int out_channels, ActTensor* y) {
  PointwiseLinear(x, w, b, out_channels, y);
}

void ConvNextBlockForward(const ActTensor& x, const ConvNextWeights& w,
                          ActTensor* y) {
  Require(x.c == w.channels, ErrorClass::kShapeMismatch,
          "convnext channel mismatch");
  const int c_count = x.c;
  const size_t plane = size_t(x.t) * x.f;

  ActTensor dw;
  DepthwiseConv2dForward(x, w.dw_w, w.dw_b, 7, 7, 3, 3, &dw);

  // LayerNorm over the channel dim at every (m,t,f), eps 1e-6.
  ActTensor ln(x.m, c_count, x.t, x.f);
  const int m_count = x.m;
#pragma omp parallel for collapse(2) schedule(static)
  for (int mi = 0; mi < m_count; ++mi) {
    for (size_t i = 0; i < plane; ++i) {
      const float* base = dw.Plane(mi, 0) + i;
      double mean = 0.0;
      for (int c = 0; c < c_count; ++c) mean += base[c * plane];
      mean /= c_count;
      double var = 0.0;
      for (int c = 0; c < c_count; ++c) {
        double d = base[c * plane] - mean;
        var += d * d;
      }
      var /= c_count;
      const double inv = 1.0 / std::sqrt(var + 1e-6);
      float* out_base = ln.Plane(mi, 0) + i;
      for (int c = 0; c < c_count; ++c)
        out_base[c * plane] =
            float((base[c * plane] - mean) * inv * w.ln_gamma[c] +
                  w.ln_beta[c]);
    }
  }

  ActTensor mid;
  PointwiseLinear(ln, w.pw1_w, w.pw1_b, 4 * c_count, &mid);
  {
    float* p = mid.v.data();
    const size_t n = mid.v.size();
#pragma omp parallel for schedule(static)
    for (size_t i = 0; i < n; ++i) p[i] = Gelu(p[i]);
  }
  PointwiseLinear(mid, w.pw2_w, w.pw2_b, c_count, y);

  {
    float* p = y->v.data();
    const float* r = x.v.data();
    const size_t n = y->v.size();
#pragma omp parallel for schedule(static)
    for (size_t i = 0; i < n; ++i) p[i] += r[i];
  }
}

void GruStackForward(const ActTensor& x, const GruStackWeights& w,
                     ActTensor* y) {
  const int h = w.hidden;
  ActTensor cur;
  ChannelLinearForward(x, w.lin_w, w.lin_b, h, &cur);

  const int m_count = x.m, t_count = x.t, f_count = x.f;
  for (const GruLayerWeights& lw : w.layers) {
    ActTensor next(m_count, h, t_count, f_count);
    const size_t plane = size_t(t_count) * f_count;
#pragma omp parallel for collapse(2) schedule(static)
    for (int mi = 0; mi < m_count; ++mi) {
      for (int fi = 0; fi < f_count; ++fi) {
        std::vector<float> hid(h, 0.0f);
        std::vector<float> gi(3 * h), gh(3 * h);
        const float* in_base = cur.Plane(mi, 0);
        float* out_base = next.Plane(mi, 0);
        for (int t = 0; t < t_count; ++t) {
          const size_t pos = size_t(t) * f_count + fi;
          // gates: r, z, n
          for (int g = 0; g < 3 * h; ++g) {
            const float* wrow = lw.w_ih + size_t(g) * h;
            double acc = lw.b_ih[g];
            for (int c = 0; c < h; ++c)
              acc += double(wrow[c]) * in_base[c * plane + pos];
            gi[g] = float(acc);
            const float* urow = lw.w_hh + size_t(g) * h;
            double acc2 = lw.b_hh[g];
            for (int c = 0; c < h; ++c) acc2 += double(urow[c]) * hid[c];
            gh[g] = float(acc2);
          }
          for (int c = 0; c < h; ++c) {
            const double r = 1.0 / (1.0 + std::exp(-double(gi[c] + gh[c])));
            const double z =
                1.0 / (1.0 + std::exp(-double(gi[h + c] + gh[h + c])));
            const double n =
                std::tanh(double(gi[2 * h + c]) + r * double(gh[2 * h + c]));
            const double hv = (1.0 - z) * n + z * double(hid[c]);
            hid[c] = float(hv);
            out_base[c * plane + pos] = hid[c];
          }
        }
      }
    }
    cur = std::move(next);
  }
  *y = std::move(cur);
}

void TacForward(const ActTensor& x, const float* a_w, const float* a_b,
                const float* b_w, const float* b_b, ActTensor* y) {
  Require(x.c % 2 == 0, ErrorClass::kOddChannels,
          "TAC needs an even channel count, got " + std::to_string(x.c));
  const int half = x.c / 2;
  ActTensor ua, ub;
  PointwiseLinear(x, a_w, a_b, half, &ua);
  PointwiseLinear(x, b_w, b_b, half, &ub);
  float* pa = ua.v.data();
  float* pb = ub.v.data();
  const size_t na = ua.v.size();
#pragma omp parallel for schedule(static)
  for (size_t i = 0; i < na; ++i) {
    pa[i] = pa[i] > 0.0f ? pa[i] : 0.0f;
    pb[i] = pb[i] > 0.0f ? pb[i] : 0.0f;
  }

  *y = ActTensor(x.m, x.c, x.t, x.f);
  const size_t plane = size_t(x.t) * x.f;
  const int m_count = x.m;
  const double inv_m = 1.0 / m_count;
#pragma omp parallel for collapse(2) schedule(static)
  for (int o = 0; o < half; ++o) {
    for (size_t i = 0; i < plane; ++i) {
      double mean = 0.0;
      for (int mi = 0; mi < m_count; ++mi) mean += ub.Plane(mi, o)[i];
      const float avg = float(mean * inv_m);
      for (int mi = 0; mi < m_count; ++mi) {
        y->Plane(mi, o)[i] = ua.Plane(mi, o)[i];
        y->Plane(mi, half + o)[i] = avg;
      }
    }
  }
}

void DacForward(const ActTensor& x, ActTensor* y) {
  Require(x.c % 2 == 0, ErrorClass::kOddChannels,
          "DAC needs an even channel count, got " + std::to_string(x.c));
  const int half = x.c / 2;
  *y = ActTensor(x.m, x.c, x.t, x.f);
  const size_t plane = size_t(x.t) * x.f;
  const int m_count = x.m;
  const double inv_m = 1.0 / m_count;
#pragma omp parallel for collapse(2) schedule(static)
  for (int o = 0; o < half; ++o) {
    for (size_t i = 0; i < plane; ++i) {
      double mean = 0.0;
      for (int mi = 0; mi < m_count; ++mi)
        mean += x.Plane(mi, half + o)[i];
      const float avg = float(mean * inv_m);
      for (int mi = 0; mi < m_count; ++mi) {
        y->Plane(mi, o)[i] = x.Plane(mi, o)[i];
        y->Plane(mi, half + o)[i] = avg;
      }
    }
  }
}

void AverageOverBranches(const ActTensor& x, ActTensor* y) {
  *y = ActTensor(1, x.c, x.t, x.f);
  const size_t n = size_t(x.c) * x.t * x.f;
  const int m_count = x.m;
  const double inv_m = 1.0 / m_count;
  const float* in = x.v.data();
  float* out = y->v.data();
#pragma omp parallel for schedule(static)
  for (size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int mi = 0; mi < m_count; ++mi) acc += in[size_t(mi) * n + i];
    out[i] = float(acc * inv_m);
  }
}

void HeadLinearForward(const ActTensor& x, const float* w, const float* b,
                       int out_dim, FeatureTensor* out) {
  Require(x.m == 1, ErrorClass::kSpecMismatch,
          "head reached with uncollapsed branches (M = " +
              std::to_string(x.m) + ")");
  const int in_features = x.c * x.f;
  const int t_count = x.t;
  *out = FeatureTensor(
      {{Axis::kTime, uint64_t(t_count)}, {Axis::kBin, uint64_t(out_dim)}});
#pragma omp parallel for schedule(static)
  for (int t = 0; t < t_count; ++t) {
    // Flatten (C, F) at this frame into a contiguous scratch vector.
    std::vector<float> vec(in_features);
    for (int c = 0; c < x.c; ++c) {
      const float* src = x.Plane(0, c) + size_t(t) * x.f;
      std::copy(src, src + x.f, vec.data() + size_t(c) * x.f);
    }
    float* orow = out->data.data() + size_t(t) * out_dim;
    for (int o = 0; o < out_dim; ++o) {
      const float* wrow = w + size_t(o) * in_features;
      double acc = b ? b[o] : 0.0;
      for (int i = 0; i < in_features; ++i)
        acc += double(wrow[i]) * vec[i];
      orow[o] = float(acc);
    }
  }
}

// ---------------------------------------------------------------------------
// Spec, plan
// ---------------------------------------------------------------------------

const char* StructureName(Structure s) {
  switch (s) {
    case Structure::kConv2d: return "conv2d";
    case Structure::kConvNext: return "convnext";
    case Structure::kGruConv2d: return "gru_conv2d";
  }
  return "?";
}

Structure ParseStructure(const std::string& s) {
  if (s == "conv2d") return Structure::kConv2d;
  if (s == "convnext") return Structure::kConvNext;
  if (s == "gru_conv2d") return Structure::kGruConv2d;
  Throw(ErrorClass::kBadConfig, "unknown structure: " + s);
}

const char* ChannelFusionName(ChannelFusion f) {
  switch (f) {
    case ChannelFusion::kNone: return "none";
    case ChannelFusion::kEarlyAvg: return "early_avg";
    case ChannelFusion::kLateAvg: return "late_avg";
    case ChannelFusion::kTac: return "tac";
    case ChannelFusion::kDac: return "dac";
  }
  return "?";
}

ChannelFusion ParseChannelFusion(const std::string& s) {
  if (s == "none") return ChannelFusion::kNone;
  if (s == "early_avg") return ChannelFusion::kEarlyAvg;
  if (s == "late_avg") return ChannelFusion::kLateAvg;
  if (s == "tac") return ChannelFusion::kTac;
  if (s == "dac") return ChannelFusion::kDac;
  Throw(ErrorClass::kBadConfig, "unknown fusion: " + s);
}

int EmbeddingSpec::InputChannels() const {
  switch (topology) {
    case InputLayout::kFixed: return num_mics + 1;
    case InputLayout::kSqueezed: return 2;
    case InputLayout::kExpanded: return 2;  // per branch
  }
  return 0;
}

void EmbeddingSpec::Validate() const {
  for (int c : out_channels)
    Require(c >= 1, ErrorClass::kSpecMismatch, "channel dims must be >= 1");
  Require(feature_dim >= 4, ErrorClass::kSpecMismatch, "feature_dim too small");
  Require(final_dim >= 1, ErrorClass::kSpecMismatch, "final_dim must be >= 1");
  Require(num_mics >= 1 && num_mics <= kMaxChannels, ErrorClass::kSpecMismatch,
          "num_mics out of range");
  if (structure != Structure::kConv2d)
    Require(num_blocks >= 1, ErrorClass::kSpecMismatch,
            "num_blocks must be >= 1");
  if (fusion != ChannelFusion::kNone)
    Require(topology == InputLayout::kExpanded, ErrorClass::kSpecMismatch,
            "channel fusion requires the expanded topology");
  if (topology == InputLayout::kExpanded)
    Require(fusion != ChannelFusion::kNone, ErrorClass::kSpecMismatch,
            "expanded topology needs a fusion that collapses channels");
  if (fusion == ChannelFusion::kTac || fusion == ChannelFusion::kDac)
    Require(out_channels[0] % 2 == 0 && out_channels[1] % 2 == 0,
            ErrorClass::kOddChannels,
            "tac/dac fusion needs even C1 and C2");
  if (freq_subsample_entry)
    Require(structure == Structure::kConv2d, ErrorClass::kSpecMismatch,
            "frequency-subsampled entry applies to the conv2d structure");
}

LayerPlan BuildLayerPlan(const EmbeddingSpec& spec) {
  spec.Validate();
  const int c1 = spec.out_channels[0];
  const int c2 = spec.out_channels[1];
  const int c3 = spec.out_channels[2];
  const bool fuse_tacdac =
      spec.fusion == ChannelFusion::kTac || spec.fusion == ChannelFusion::kDac;

  LayerPlan plan;
  int freq = spec.feature_dim;
  int cin = spec.InputChannels();

  auto add_conv = [&](const std::string& path, int cout, int kt, int kf,
                      int st, int sf, int pt, int pf) {
    LayerDesc d;
    d.op = LayerOp::kConv;
    d.path = path;
    d.cin = cin;
    d.cout = cout;
    d.kt = kt; d.kf = kf; d.st = st; d.sf = sf; d.pt = pt; d.pf = pf;
    d.double_swish = true;
    d.freq_in = freq;
    freq = ConvOutExtent(freq, kf, sf, pf);
    d.freq_out = freq;
    plan.layers.push_back(d);
    cin = cout;
  };
  auto add_next_blocks = [&](const std::string& stage, int count) {
    for (int i = 0; i < count; ++i) {
      LayerDesc d;
      d.op = LayerOp::kConvNext;
      d.path = stage + ".next" + std::to_string(i);
      d.cin = d.cout = cin;
      d.freq_in = d.freq_out = freq;
      plan.layers.push_back(d);
    }
  };
  auto add_fusion = [&](const std::string& path) {
    LayerDesc d;
    d.op = spec.fusion == ChannelFusion::kTac ? LayerOp::kTac : LayerOp::kDac;
    d.path = path;  // dac stores no weights under this name
    d.cin = d.cout = cin;
    d.freq_in = d.freq_out = freq;
    plan.layers.push_back(d);
  };
  auto add_avg = [&]() {
    LayerDesc d;
    d.op = LayerOp::kAvgOverM;
    d.cin = d.cout = cin;
    d.freq_in = d.freq_out = freq;
    plan.layers.push_back(d);
  };

  // Entry stage.
  switch (spec.structure) {
    case Structure::kConv2d:
      if (spec.freq_subsample_entry)
        add_conv("entry.conv", c1, 3, 3, 1, 2, 1, 1);
      else
        add_conv("entry.conv", c1, 3, 1, 1, 1, 1, 0);
      break;
    case Structure::kConvNext:
      add_conv("entry.conv", c1, 3, 1, 1, 1, 1, 0);
      add_next_blocks("stage1", 1);
      break;
    case Structure::kGruConv2d: {
      LayerDesc d;
      d.op = LayerOp::kGruStack;
      d.path = "entry";
      d.cin = cin;
      d.cout = c1;
      d.gru_layers = spec.num_blocks;
      d.freq_in = d.freq_out = freq;
      plan.layers.push_back(d);
      cin = c1;
      break;
    }
  }

  if (spec.fusion == ChannelFusion::kEarlyAvg) add_avg();
  if (fuse_tacdac) add_fusion("fuse1");

  add_conv("sub1.conv", c2, 3, 3, 2, 2, 1, 1);
  if (spec.structure == Structure::kConvNext)
    add_next_blocks("stage2", spec.num_blocks);

  if (fuse_tacdac) add_fusion("fuse2");

  add_conv("sub2.conv", c3, 3, 3, 2, 2, 1, 1);
  if (spec.structure == Structure::kConvNext)
    add_next_blocks("stage3", spec.num_blocks);

  if (spec.fusion == ChannelFusion::kLateAvg || fuse_tacdac) add_avg();

  LayerDesc head;
  head.op = LayerOp::kHead;
  head.path = "head";
  head.cin = cin;
  head.cout = spec.final_dim;
  head.freq_in = head.freq_out = freq;
  plan.layers.push_back(head);

  plan.final_freq = freq;
  plan.head_in_features = cin * freq;
  return plan;
}

// ---------------------------------------------------------------------------
// Weights
// ---------------------------------------------------------------------------

const WeightStore::Param& WeightStore::Get(const std::string& path) const {
  auto it = index.find(path);
  Require(it != index.end(), ErrorClass::kSpecMismatch,
          "missing parameter: " + path);
  return params[it->second];
}

size_t WeightStore::TotalParameters() const {
  size_t n = 0;
  for (const auto& p : params) n += p.values.size();
  return n;
}

void WeightStore::Add(const std::string& path, std::vector<int> shape,
                      std::vector<float> values) {
  index[path] = params.size();
  params.push_back(Param{path, std::move(shape), std::move(values)});
}

namespace {

size_t ShapeNumEl(const std::vector<int>& shape) {
  size_t n = 1;
  for (int d : shape) n *= size_t(d);
  return n;
}

void DrawParam(WeightStore* store, SplitMix64* rng, const std::string& path,
               std::vector<int> shape) {
  size_t n = ShapeNumEl(shape);
  std::vector<float> v(n);
  for (size_t i = 0; i < n; ++i)
    v[i] = float(rng->NextUniform(-0.1, 0.1));
  store->Add(path, std::move(shape), std::move(v));
}

}  // namespace

WeightStore InitWeights(const EmbeddingSpec& spec, uint64_t seed) {
  LayerPlan plan = BuildLayerPlan(spec);
  WeightStore store;
  store.seed = seed;
  SplitMix64 rng(seed);

  for (const LayerDesc& d : plan.layers) {
    switch (d.op) {
      case LayerOp::kConv:
        DrawParam(&store, &rng, d.path + ".weight",
                  {d.cout, d.cin, d.kt, d.kf});
        DrawParam(&store, &rng, d.path + ".bias", {d.cout});
        break;
      case LayerOp::kConvNext:
        DrawParam(&store, &rng, d.path + ".dw.weight", {d.cin, 7, 7});
        DrawParam(&store, &rng, d.path + ".dw.bias", {d.cin});
        DrawParam(&store, &rng, d.path + ".ln.gamma", {d.cin});
        DrawParam(&store, &rng, d.path + ".ln.beta", {d.cin});
        DrawParam(&store, &rng, d.path + ".pw1.weight", {4 * d.cin, d.cin});
        DrawParam(&store, &rng, d.path + ".pw1.bias", {4 * d.cin});
        DrawParam(&store, &rng, d.path + ".pw2.weight", {d.cin, 4 * d.cin});
        DrawParam(&store, &rng, d.path + ".pw2.bias", {d.cin});
        break;
      case LayerOp::kGruStack: {
        DrawParam(&store, &rng, d.path + ".linear.weight", {d.cout, d.cin});
        DrawParam(&store, &rng, d.path + ".linear.bias", {d.cout});
        for (int l = 0; l < d.gru_layers; ++l) {
          const std::string base = d.path + ".gru" + std::to_string(l);
          DrawParam(&store, &rng, base + ".w_ih", {3 * d.cout, d.cout});
          DrawParam(&store, &rng, base + ".w_hh", {3 * d.cout, d.cout});
          DrawParam(&store, &rng, base + ".b_ih", {3 * d.cout});
          DrawParam(&store, &rng, base + ".b_hh", {3 * d.cout});
        }
        break;
      }
      case LayerOp::kTac:
        DrawParam(&store, &rng, d.path + ".a.weight", {d.cin / 2, d.cin});
        DrawParam(&store, &rng, d.path + ".a.bias", {d.cin / 2});
        DrawParam(&store, &rng, d.path + ".b.weight", {d.cin / 2, d.cin});
        DrawParam(&store, &rng, d.path + ".b.bias", {d.cin / 2});
        break;
      case LayerOp::kDac:
      case LayerOp::kAvgOverM:
        break;  // parameter-free
      case LayerOp::kHead: {
        int in_features = d.cin * d.freq_in;
        DrawParam(&store, &rng, "head.linear.weight",
                  {d.cout, in_features});
        DrawParam(&store, &rng, "head.linear.bias", {d.cout});
        break;
      }
    }
  }
  return store;
}

void SaveWeights(const std::string& base_path, const WeightStore& w) {
  std::ofstream manifest(base_path + ".manifest", std::ios::trunc);
  if (!manifest)
    Throw(ErrorClass::kIoError, "cannot write " + base_path + ".manifest");
  std::ofstream blob(base_path + ".sefw", std::ios::binary | std::ios::trunc);
  if (!blob) Throw(ErrorClass::kIoError, "cannot write " + base_path + ".sefw");

  manifest << "seed = " << w.seed << "\n";
  for (const auto& p : w.params) {
    manifest << p.path << " = ";
    for (size_t i = 0; i < p.shape.size(); ++i) {
      if (i) manifest << "x";
      manifest << p.shape[i];
    }
    manifest << "\n";

    // Parameter records reuse the SEF1 container; shapes are structural, so
    // every dim is written with the feat_channel axis code.
    FeatureTensor t;
    for (int d : p.shape) t.dims.emplace_back(Axis::kFeatChannel, uint64_t(d));
    t.data = p.values;
    WriteFeatureStream(blob, t);
  }
}

WeightStore LoadWeights(const std::string& base_path) {
  std::ifstream manifest(base_path + ".manifest");
  if (!manifest)
    Throw(ErrorClass::kIoError, "cannot open " + base_path + ".manifest");
  std::ifstream blob(base_path + ".sefw", std::ios::binary);
  if (!blob) Throw(ErrorClass::kIoError, "cannot open " + base_path + ".sefw");

  WeightStore store;
  std::string line;
  bool first = true;
  while (std::getline(manifest, line)) {
    if (line.empty()) continue;
    auto eq = line.find('=');
    Require(eq != std::string::npos, ErrorClass::kBadConfig,
            "bad manifest line: " + line);
    std::string key = line.substr(0, eq);
    std::string val = line.substr(eq + 1);
    auto trim = [](std::string s) {
      size_t a = s.find_first_not_of(" \t");
      size_t b = s.find_last_not_of(" \t");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    key = trim(key);
    val = trim(val);
    if (first && key == "seed") {
      store.seed = std::stoull(val);
      first = false;
      continue;
    }
    first = false;
    std::vector<int> shape;
    std::stringstream ss(val);
    std::string tok;
    while (std::getline(ss, tok, 'x')) shape.push_back(std::stoi(tok));

    FeatureTensor t = ReadFeatureStream(blob);
    Require(t.dims.size() == shape.size(), ErrorClass::kShapeMismatch,
            "weight rank mismatch for " + key);
    for (size_t i = 0; i < shape.size(); ++i)
      Require(t.dims[i].second == uint64_t(shape[i]),
              ErrorClass::kShapeMismatch, "weight extent mismatch for " + key);
    store.Add(key, std::move(shape), std::move(t.data));
  }
  return store;
}

// ---------------------------------------------------------------------------
// Forward
// ---------------------------------------------------------------------------

namespace {

ActTensor ToAct(const FusedInput& input) {
  const FeatureTensor& t = input.data;
  ActTensor act;
  if (input.layout == InputLayout::kExpanded) {
    act = ActTensor(int(t.Extent(0)), int(t.Extent(1)), int(t.Extent(2)),
                    int(t.Extent(3)));
  } else {
    act = ActTensor(1, int(t.Extent(0)), int(t.Extent(1)), int(t.Extent(2)));
  }
  std::copy(t.data.begin(), t.data.end(), act.v.begin());
  return act;
}

void Trace(ForwardTrace* trace, const std::string& name, const ActTensor& a) {
  if (!trace) return;
  trace->entries.push_back({name, a.m, a.c, a.t, a.f});
}

}  // namespace

FeatureTensor EmbedForward(const EmbeddingSpec& spec, const WeightStore& w,
                           const FusedInput& input, ForwardTrace* trace) {
  input.Validate();
  Require(input.layout == spec.topology, ErrorClass::kSpecMismatch,
          "input layout does not match spec topology");
  Require(int(input.data.Extent(input.data.Ndim() - 1)) == spec.feature_dim,
          ErrorClass::kSpecMismatch,
          "input feature dim does not match spec");
  if (spec.topology == InputLayout::kFixed)
    Require(input.num_mics == spec.num_mics, ErrorClass::kSpecMismatch,
            "input mic count does not match spec");

  LayerPlan plan = BuildLayerPlan(spec);
  ActTensor cur = ToAct(input);
  Trace(trace, "input", cur);

  FeatureTensor out;
  for (const LayerDesc& d : plan.layers) {
    switch (d.op) {
      case LayerOp::kConv: {
        ActTensor y;
        Conv2dForward(cur, w.Data(d.path + ".weight"),
                      w.Data(d.path + ".bias"), d.cout, d.kt, d.kf, d.st,
                      d.sf, d.pt, d.pf, &y);
        if (d.double_swish) DoubleSwishInplace(&y);
        cur = std::move(y);
        break;
      }
      case LayerOp::kConvNext: {
        ConvNextWeights cw;
        cw.channels = d.cin;
        cw.dw_w = w.Data(d.path + ".dw.weight");
        cw.dw_b = w.Data(d.path + ".dw.bias");
        cw.ln_gamma = w.Data(d.path + ".ln.gamma");
        cw.ln_beta = w.Data(d.path + ".ln.beta");
        cw.pw1_w = w.Data(d.path + ".pw1.weight");
        cw.pw1_b = w.Data(d.path + ".pw1.bias");
        cw.pw2_w = w.Data(d.path + ".pw2.weight");
        cw.pw2_b = w.Data(d.path + ".pw2.bias");
        ActTensor y;
        ConvNextBlockForward(cur, cw, &y);
        cur = std::move(y);
        break;
      }
      case LayerOp::kGruStack: {
        GruStackWeights gw;
        gw.hidden = d.cout;
        gw.lin_w = w.Data(d.path + ".linear.weight");
        gw.lin_b = w.Data(d.path + ".linear.bias");
        for (int l = 0; l < d.gru_layers; ++l) {
          const std::string base = d.path + ".gru" + std::to_string(l);
          gw.layers.push_back({w.Data(base + ".w_ih"), w.Data(base + ".w_hh"),
                               w.Data(base + ".b_ih"),
                               w.Data(base + ".b_hh")});
        }
        ActTensor y;
        GruStackForward(cur, gw, &y);
        cur = std::move(y);
        break;
      }
      case LayerOp::kTac: {
        ActTensor y;
        TacForward(cur, w.Data(d.path + ".a.weight"),
                   w.Data(d.path + ".a.bias"), w.Data(d.path + ".b.weight"),
                   w.Data(d.path + ".b.bias"), &y);
        cur = std::move(y);
        break;
      }
      case LayerOp::kDac: {
        ActTensor y;
        DacForward(cur, &y);
        cur = std::move(y);
        break;
      }
      case LayerOp::kAvgOverM: {
        ActTensor y;
        AverageOverBranches(cur, &y);
        cur = std::move(y);
        break;
      }
      case LayerOp::kHead: {
        HeadLinearForward(cur, w.Data("head.linear.weight"),
                          w.Data("head.linear.bias"), d.cout, &out);
        break;
      }
    }
    if (d.op == LayerOp::kHead) {
      if (trace)
        trace->entries.push_back({"head", 1, d.cout, int(out.Extent(0)), 1});
    } else {
      Trace(trace, d.path.empty() ? "avg" : d.path, cur);
    }
  }
  return out;
}

}  // namespace spatialemb

// src/ref.cpp

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

#include "spatialemb/ref.hpp"

#include <algorithm>
#include <cmath>

namespace spatialemb::ref {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

inline float ZeroPadded(const ActTensor& x, int mi, int ci, int ti, int fi) {
  if (ti < 0 || ti >= x.t || fi < 0 || fi >= x.f) return 0.0f;
  return x.At(mi, ci, ti, fi);
}

inline void Charge(FlopMeter* fm, uint64_t n) {
  if (fm) fm->Add(n);
}

}  // namespace

std::vector<std::complex<double>> NaiveDft(
    const std::vector<std::complex<double>>& in) {
  const size_t n = in.size();
  std::vector<std::complex<double>> out(n);
  for (size_t k = 0; k < n; ++k) {
    std::complex<double> acc(0.0, 0.0);
    for (size_t j = 0; j < n; ++j) {
      double a = -2.0 * kPi * double(j) * double(k) / double(n);
      acc += in[j] * std::complex<double>(std::cos(a), std::sin(a));
    }
    out[k] = acc;
  }
  return out;
}

PhaseTensor RirPhaseNaive(const Spectrogram& mix, const SoloKernel& kernel) {
  Require(mix.num_channels == kernel.num_channels &&
              mix.num_bins == kernel.num_bins,
          ErrorClass::kShapeMismatch, "kernel M/F mismatch");
  PhaseTensor rp;
  rp.num_channels = mix.num_channels;
  rp.num_frames = mix.num_frames;
  rp.num_bins = mix.num_bins;
  rp.values.assign(
      size_t(rp.num_channels) * rp.num_frames * rp.num_bins, 0.0f);
  for (int m = 0; m < mix.num_channels; ++m)
    for (int t = 0; t < mix.num_frames; ++t)
      for (int f = 0; f < mix.num_bins; ++f) {
        std::complex<double> acc(0.0, 0.0);
        for (int k = 0; k < kernel.num_frames; ++k) {
          if (t - k < 0) continue;
          std::complex<double> y = mix.Frame(m, t - k)[f];
          std::complex<double> r = kernel.Frame(m, k)[f];
          acc += y * std::conj(r);
        }
        float phase = 0.0f;
        if (acc != std::complex<double>(0.0, 0.0)) {
          double p = std::arg(acc);
          if (p <= -kPi) p = kPi;
          phase = float(p);
        }
        rp.At(m, t, f) = phase;
      }
  return rp;
}

FeatureTensor AllPairsNaive(const PhaseTensor& rp) {
  Require(rp.num_channels >= 2, ErrorClass::kNeedTwoChannels, "M < 2");
  const int m_count = rp.num_channels;
  FeatureTensor sf({{Axis::kTime, uint64_t(rp.num_frames)},
                    {Axis::kFreq, uint64_t(rp.num_bins)}});
  for (int t = 0; t < rp.num_frames; ++t)
    for (int f = 0; f < rp.num_bins; ++f) {
      double acc = 0.0;
      for (int i = 0; i < m_count; ++i)
        for (int j = 0; j < m_count; ++j) {
          if (i == j) continue;
          acc += std::cos(double(rp.At(i, t, f)) - rp.At(j, t, f));
        }
      sf.data[size_t(t) * rp.num_bins + f] =
          float(acc / (double(m_count) * (m_count - 1)));
    }
  return sf;
}

FeatureTensor CcaSqueezeNaive(const FeatureTensor& spectral) {
  const int m_count = int(spectral.Extent(0));
  const int t_count = int(spectral.Extent(1));
  const int fd = int(spectral.Extent(2));
  FeatureTensor out({{Axis::kTime, uint64_t(t_count)}, spectral.dims[2]});
  const size_t plane = size_t(t_count) * fd;
  auto at = [&](int m, int t, int j) {
    return double(spectral.data[size_t(m) * plane + size_t(t) * fd + j]);
  };
  for (int t = 0; t < t_count; ++t) {
    std::vector<double> q(fd, 0.0);
    for (int m = 0; m < m_count; ++m)
      for (int j = 0; j < fd; ++j) q[j] += at(m, t, j) / m_count;
    std::vector<double> e(m_count);
    double z = 0.0, mx = -1e300;
    for (int m = 0; m < m_count; ++m) {
      double s = 0.0;
      for (int j = 0; j < fd; ++j) s += q[j] * at(m, t, j);
      e[m] = s / std::sqrt(double(fd));
      mx = std::max(mx, e[m]);
    }
    for (int m = 0; m < m_count; ++m) {
      e[m] = std::exp(e[m] - mx);
      z += e[m];
    }
    for (int j = 0; j < fd; ++j) {
      double acc = 0.0;
      for (int m = 0; m < m_count; ++m) acc += e[m] / z * at(m, t, j);
      out.data[size_t(t) * fd + j] = float(acc);
    }
  }
  return out;
}

void Conv2dNaive(const ActTensor& x, const float* w, const float* b, int cout,
                 int kt, int kf, int st, int sf, int pt, int pf, ActTensor* y,
                 FlopMeter* fm) {
  const int to_count = ConvOutExtent(x.t, kt, st, pt);
  const int fo_count = ConvOutExtent(x.f, kf, sf, pf);
  *y = ActTensor(x.m, cout, to_count, fo_count);
  for (int mi = 0; mi < x.m; ++mi)
    for (int co = 0; co < cout; ++co)
      for (int to = 0; to < to_count; ++to)
        for (int fo = 0; fo < fo_count; ++fo) {
          double acc = 0.0;
          for (int ci = 0; ci < x.c; ++ci)
            for (int i = 0; i < kt; ++i)
              for (int j = 0; j < kf; ++j) {
                // Padding taps multiply an explicit zero; every tap is a
                // multiply-add, matching the analytic 2*cin*kt*kf per output.
                acc += double(w[((size_t(co) * x.c + ci) * kt + i) * kf + j]) *
                       ZeroPadded(x, mi, ci, to * st - pt + i,
                                  fo * sf - pf + j);
                Charge(fm, 2);
              }
          y->At(mi, co, to, fo) = float(acc + (b ? b[co] : 0.0f));
        }
}

void DepthwiseConv2dNaive(const ActTensor& x, const float* w, const float* b,
                          int kt, int kf, int pt, int pf, ActTensor* y,
                          FlopMeter* fm) {
  const int to_count = ConvOutExtent(x.t, kt, 1, pt);
  const int fo_count = ConvOutExtent(x.f, kf, 1, pf);
  *y = ActTensor(x.m, x.c, to_count, fo_count);
  for (int mi = 0; mi < x.m; ++mi)
    for (int ci = 0; ci < x.c; ++ci)
      for (int to = 0; to < to_count; ++to)
        for (int fo = 0; fo < fo_count; ++fo) {
          double acc = 0.0;
          for (int i = 0; i < kt; ++i)
            for (int j = 0; j < kf; ++j) {
              acc += double(w[(size_t(ci) * kt + i) * kf + j]) *
                     ZeroPadded(x, mi, ci, to - pt + i, fo - pf + j);
              Charge(fm, 2);
            }
          y->At(mi, ci, to, fo) = float(acc + (b ? b[ci] : 0.0f));
        }
}

void DoubleSwishNaive(ActTensor* x, FlopMeter* fm) {
  for (float& v : x->v) {
    v = float(DoubleSwish(v));
    Charge(fm, 1);
  }
}

void ChannelLinearNaive(const ActTensor& x, const float* w, const float* b,
                        int out_channels, ActTensor* y, FlopMeter* fm) {
  *y = ActTensor(x.m, out_channels, x.t, x.f);
  for (int mi = 0; mi < x.m; ++mi)
    for (int o = 0; o < out_channels; ++o)
      for (int ti = 0; ti < x.t; ++ti)
        for (int fi = 0; fi < x.f; ++fi) {
          double acc = 0.0;
          for (int ci = 0; ci < x.c; ++ci) {
            acc += double(w[size_t(o) * x.c + ci]) * x.At(mi, ci, ti, fi);
            Charge(fm, 2);
          }
          y->At(mi, o, ti, fi) = float(acc + (b ? b[o] : 0.0f));
        }
}

void ConvNextBlockNaive(const ActTensor& x, const ConvNextWeights& w,
                        ActTensor* y, FlopMeter* fm) {
  const int c_count = x.c;
  ActTensor dw;
  DepthwiseConv2dNaive(x, w.dw_w, w.dw_b, 7, 7, 3, 3, &dw, fm);

  // LayerNorm, charged at 7C + 4 per position (see the convention table).
  ActTensor ln(x.m, c_count, x.t, x.f);
  for (int mi = 0; mi < x.m; ++mi)
    for (int ti = 0; ti < x.t; ++ti)
      for (int fi = 0; fi < x.f; ++fi) {
        double sum = 0.0;
        for (int c = 0; c < c_count; ++c) {
          sum += dw.At(mi, c, ti, fi);
          Charge(fm, 1);
        }
        double mean = sum / c_count;
        Charge(fm, 1);
        double var = 0.0;
        for (int c = 0; c < c_count; ++c) {
          double d = dw.At(mi, c, ti, fi) - mean;
          Charge(fm, 1);
          var += d * d;
          Charge(fm, 2);
        }
        var /= c_count;
        Charge(fm, 1);
        double inv = 1.0 / std::sqrt(var + 1e-6);
        Charge(fm, 2);
        for (int c = 0; c < c_count; ++c) {
          ln.At(mi, c, ti, fi) =
              float((dw.At(mi, c, ti, fi) - mean) * inv *
                        double(w.ln_gamma[c]) +
                    w.ln_beta[c]);
          Charge(fm, 3);
        }
      }

  ActTensor mid;
  ChannelLinearNaive(ln, w.pw1_w, w.pw1_b, 4 * c_count, &mid, fm);
  for (float& v : mid.v) {
    v = float(0.5 * double(v) *
              (1.0 + std::erf(double(v) * 0.70710678118654752440)));
    Charge(fm, 1);
  }
  ChannelLinearNaive(mid, w.pw2_w, w.pw2_b, c_count, y, fm);
  for (size_t i = 0; i < y->v.size(); ++i) {
    y->v[i] += x.v[i];
    Charge(fm, 1);
  }
}

void GruStackNaive(const ActTensor& x, const GruStackWeights& w, ActTensor* y,
                   FlopMeter* fm) {
  const int h = w.hidden;
  ActTensor cur;
  ChannelLinearNaive(x, w.lin_w, w.lin_b, h, &cur, fm);

  for (const GruLayerWeights& lw : w.layers) {
    ActTensor next(x.m, h, x.t, x.f);
    for (int mi = 0; mi < x.m; ++mi)
      for (int fi = 0; fi < x.f; ++fi) {
        std::vector<double> hid(h, 0.0);
        for (int t = 0; t < x.t; ++t) {
          std::vector<double> gi(3 * h), gh(3 * h);
          for (int g = 0; g < 3 * h; ++g) {
            double a = lw.b_ih[g];
            for (int c = 0; c < h; ++c) {
              a += double(lw.w_ih[size_t(g) * h + c]) * cur.At(mi, c, t, fi);
              Charge(fm, 2);
            }
            gi[g] = a;
            double b2 = lw.b_hh[g];
            for (int c = 0; c < h; ++c) {
              b2 += double(lw.w_hh[size_t(g) * h + c]) * hid[c];
              Charge(fm, 2);
            }
            gh[g] = b2;
          }
          // Gate arithmetic below the matmuls is not charged.
          for (int c = 0; c < h; ++c) {
            double r = 1.0 / (1.0 + std::exp(-(gi[c] + gh[c])));
            double z = 1.0 / (1.0 + std::exp(-(gi[h + c] + gh[h + c])));
            double n = std::tanh(gi[2 * h + c] + r * gh[2 * h + c]);
            hid[c] = (1.0 - z) * n + z * hid[c];
            next.At(mi, c, t, fi) = float(hid[c]);
          }
        }
      }
    cur = std::move(next);
  }
  *y = std::move(cur);
}

void TacNaive(const ActTensor& x, const float* a_w, const float* a_b,
              const float* b_w, const float* b_b, ActTensor* y,
              FlopMeter* fm) {
  Require(x.c % 2 == 0, ErrorClass::kOddChannels, "odd channel count");
  const int half = x.c / 2;
  ActTensor ua, ub;
  ChannelLinearNaive(x, a_w, a_b, half, &ua, fm);
  ChannelLinearNaive(x, b_w, b_b, half, &ub, fm);
  for (float& v : ua.v) {
    v = std::max(v, 0.0f);
    Charge(fm, 1);
  }
  for (float& v : ub.v) {
    v = std::max(v, 0.0f);
    Charge(fm, 1);
  }
  *y = ActTensor(x.m, x.c, x.t, x.f);
  for (int o = 0; o < half; ++o)
    for (int ti = 0; ti < x.t; ++ti)
      for (int fi = 0; fi < x.f; ++fi) {
        double acc = ub.At(0, o, ti, fi);
        for (int mi = 1; mi < x.m; ++mi) {
          acc += ub.At(mi, o, ti, fi);
          Charge(fm, 1);
        }
        float avg = float(acc / x.m);
        for (int mi = 0; mi < x.m; ++mi) {
          y->At(mi, o, ti, fi) = ua.At(mi, o, ti, fi);
          y->At(mi, half + o, ti, fi) = avg;
        }
      }
}

void DacNaive(const ActTensor& x, ActTensor* y, FlopMeter* fm) {
  Require(x.c % 2 == 0, ErrorClass::kOddChannels, "odd channel count");
  const int half = x.c / 2;
  *y = ActTensor(x.m, x.c, x.t, x.f);
  for (int o = 0; o < half; ++o)
    for (int ti = 0; ti < x.t; ++ti)
      for (int fi = 0; fi < x.f; ++fi) {
        double acc = x.At(0, half + o, ti, fi);
        for (int mi = 1; mi < x.m; ++mi) {
          acc += x.At(mi, half + o, ti, fi);
          Charge(fm, 1);
        }
        float avg = float(acc / x.m);
        for (int mi = 0; mi < x.m; ++mi) {
          y->At(mi, o, ti, fi) = x.At(mi, o, ti, fi);
          y->At(mi, half + o, ti, fi) = avg;
        }
      }
}

void AverageOverBranchesNaive(const ActTensor& x, ActTensor* y,
                              FlopMeter* fm) {
  *y = ActTensor(1, x.c, x.t, x.f);
  for (int c = 0; c < x.c; ++c)
    for (int ti = 0; ti < x.t; ++ti)
      for (int fi = 0; fi < x.f; ++fi) {
        double acc = x.At(0, c, ti, fi);
        for (int mi = 1; mi < x.m; ++mi) {
          acc += x.At(mi, c, ti, fi);
          Charge(fm, 1);
        }
        y->At(0, c, ti, fi) = float(acc / x.m);
      }
}

void HeadLinearNaive(const ActTensor& x, const float* w, const float* b,
                     int out_dim, FeatureTensor* out, FlopMeter* fm) {
  Require(x.m == 1, ErrorClass::kSpecMismatch, "branches not collapsed");
  const int in_features = x.c * x.f;
  *out = FeatureTensor(
      {{Axis::kTime, uint64_t(x.t)}, {Axis::kBin, uint64_t(out_dim)}});
  for (int t = 0; t < x.t; ++t)
    for (int o = 0; o < out_dim; ++o) {
      double acc = b ? b[o] : 0.0;
      for (int c = 0; c < x.c; ++c)
        for (int fi = 0; fi < x.f; ++fi) {
          acc += double(w[size_t(o) * in_features + size_t(c) * x.f + fi]) *
                 x.At(0, c, t, fi);
          Charge(fm, 2);
        }
      out->data[size_t(t) * out_dim + o] = float(acc);
    }
}

FeatureTensor ForwardNaive(const EmbeddingSpec& spec, const WeightStore& w,
                           const FusedInput& input, FlopMeter* fm) {
  input.Validate();
  Require(input.layout == spec.topology, ErrorClass::kSpecMismatch,
          "layout/topology mismatch");
  LayerPlan plan = BuildLayerPlan(spec);

  ActTensor cur;
  const FeatureTensor& t = input.data;
  if (input.layout == InputLayout::kExpanded)
    cur = ActTensor(int(t.Extent(0)), int(t.Extent(1)), int(t.Extent(2)),
                    int(t.Extent(3)));
  else
    cur = ActTensor(1, int(t.Extent(0)), int(t.Extent(1)), int(t.Extent(2)));
  std::copy(t.data.begin(), t.data.end(), cur.v.begin());

  FeatureTensor out;
  for (const LayerDesc& d : plan.layers) {
    switch (d.op) {
      case LayerOp::kConv: {
        ActTensor y;
        Conv2dNaive(cur, w.Data(d.path + ".weight"), w.Data(d.path + ".bias"),
                    d.cout, d.kt, d.kf, d.st, d.sf, d.pt, d.pf, &y, fm);
        if (d.double_swish) DoubleSwishNaive(&y, fm);
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
        ConvNextBlockNaive(cur, cw, &y, fm);
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
        GruStackNaive(cur, gw, &y, fm);
        cur = std::move(y);
        break;
      }
      case LayerOp::kTac: {
        ActTensor y;
        TacNaive(cur, w.Data(d.path + ".a.weight"), w.Data(d.path + ".a.bias"),
                 w.Data(d.path + ".b.weight"), w.Data(d.path + ".b.bias"), &y,
                 fm);
        cur = std::move(y);
        break;
      }
      case LayerOp::kDac: {
        ActTensor y;
        DacNaive(cur, &y, fm);
        cur = std::move(y);
        break;
      }
      case LayerOp::kAvgOverM: {
        ActTensor y;
        AverageOverBranchesNaive(cur, &y, fm);
        cur = std::move(y);
        break;
      }
      case LayerOp::kHead:
        HeadLinearNaive(cur, w.Data("head.linear.weight"),
                        w.Data("head.linear.bias"), d.cout, &out, fm);
        break;
    }
  }
  return out;
}

}  // namespace spatialemb::ref

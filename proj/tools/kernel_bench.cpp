// tools/kernel_bench.cpp

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

// Side-by-side timing of the OpenMP kernels against the serial reference
// implementations, with a max-abs-diff column as a correctness cross-check.

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <vector>

#include "spatialemb/embedding.hpp"
#include "spatialemb/ref.hpp"
#include "spatialemb/rng.hpp"
#include "spatialemb/spatial.hpp"

using namespace spatialemb;

namespace {

double TimeMedianMs(const std::function<void()>& fn, int repeats = 3) {
  std::vector<double> ms;
  for (int i = 0; i < repeats; ++i) {
    auto t0 = std::chrono::steady_clock::now();
    fn();
    auto t1 = std::chrono::steady_clock::now();
    ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  std::sort(ms.begin(), ms.end());
  return ms[ms.size() / 2];
}

double MaxDiff(const std::vector<float>& a, const std::vector<float>& b) {
  double m = 0.0;
  for (size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(double(a[i]) - b[i]));
  return m;
}

ActTensor RandomAct(SplitMix64* rng, int m, int c, int t, int f) {
  ActTensor a(m, c, t, f);
  for (auto& v : a.v) v = float(rng->NextUniform(-1.0, 1.0));
  return a;
}

std::vector<float> Draw(SplitMix64* rng, size_t n) {
  std::vector<float> v(n);
  for (auto& x : v) x = float(rng->NextUniform(-0.1, 0.1));
  return v;
}

void Report(const char* name, double serial_ms, double parallel_ms,
            double diff) {
  std::printf("%-22s %10.2f %12.2f %9.2fx %12.3g\n", name, serial_ms,
              parallel_ms, serial_ms / parallel_ms, diff);
}

}  // namespace

int main(int argc, char** argv) {
  int threads = omp_get_max_threads();
  if (argc > 1) threads = std::max(1, std::atoi(argv[1]));
  omp_set_num_threads(threads);

  std::printf("kernel benchmark, %d thread(s)\n", threads);
  std::printf("%-22s %10s %12s %9s %12s\n", "kernel", "serial_ms",
              "parallel_ms", "speedup", "max_diff");

  SplitMix64 rng(42);

  {
    PhaseTensor rp;
    rp.num_channels = 8;
    rp.num_frames = 400;
    rp.num_bins = 201;
    rp.values.resize(size_t(8) * 400 * 201);
    for (auto& v : rp.values) v = float(rng.NextUniform(-3.1, 3.1));
    FeatureTensor fast, slow;
    double pms = TimeMedianMs([&] { fast = AllPairsSpatialFeature(rp); });
    double sms = TimeMedianMs([&] { slow = ref::AllPairsNaive(rp); });
    Report("all_pairs_sf", sms, pms, MaxDiff(fast.data, slow.data));
  }

  {
    Spectrogram y;
    y.num_channels = 4;
    y.num_frames = 300;
    y.num_bins = 201;
    y.coeffs.resize(size_t(4) * 300 * 201);
    for (auto& c : y.coeffs)
      c = std::complex<float>(float(rng.NextUniform(-1, 1)),
                              float(rng.NextUniform(-1, 1)));
    SoloKernel k;
    k.num_channels = 4;
    k.num_frames = 10;
    k.num_bins = 201;
    k.frames.resize(size_t(4) * 10 * 201);
    for (auto& c : k.frames)
      c = std::complex<float>(float(rng.NextUniform(-1, 1)),
                              float(rng.NextUniform(-1, 1)));
    PhaseTensor fast, slow;
    double pms = TimeMedianMs([&] { fast = RirPhase(y, k); });
    double sms = TimeMedianMs([&] { slow = ref::RirPhaseNaive(y, k); });
    Report("rir_phase", sms, pms, MaxDiff(fast.values, slow.values));
  }

  {
    ActTensor x = RandomAct(&rng, 1, 16, 200, 101);
    auto w = Draw(&rng, size_t(32) * 16 * 9);
    auto b = Draw(&rng, 32);
    ActTensor fast, slow;
    double pms = TimeMedianMs([&] {
      Conv2dForward(x, w.data(), b.data(), 32, 3, 3, 2, 2, 1, 1, &fast);
    });
    double sms = TimeMedianMs([&] {
      ref::Conv2dNaive(x, w.data(), b.data(), 32, 3, 3, 2, 2, 1, 1, &slow);
    });
    Report("conv2d 3x3 s2", sms, pms, MaxDiff(fast.v, slow.v));
  }

  {
    ActTensor x = RandomAct(&rng, 1, 9, 200, 64);
    GruStackWeights gw;
    gw.hidden = 32;
    auto lw = Draw(&rng, size_t(32) * 9), lb = Draw(&rng, 32);
    auto wih = Draw(&rng, size_t(96) * 32), whh = Draw(&rng, size_t(96) * 32);
    auto bih = Draw(&rng, 96), bhh = Draw(&rng, 96);
    gw.lin_w = lw.data();
    gw.lin_b = lb.data();
    gw.layers.push_back({wih.data(), whh.data(), bih.data(), bhh.data()});
    ActTensor fast, slow;
    double pms = TimeMedianMs([&] { GruStackForward(x, gw, &fast); });
    double sms = TimeMedianMs([&] { ref::GruStackNaive(x, gw, &slow); });
    Report("gru_stack H=32", sms, pms, MaxDiff(fast.v, slow.v));
  }

  {
    ActTensor x = RandomAct(&rng, 1, 32, 100, 101);
    ConvNextWeights cw;
    cw.channels = 32;
    auto dww = Draw(&rng, size_t(32) * 49), dwb = Draw(&rng, 32);
    auto g = Draw(&rng, 32), be = Draw(&rng, 32);
    auto p1w = Draw(&rng, size_t(128) * 32), p1b = Draw(&rng, 128);
    auto p2w = Draw(&rng, size_t(32) * 128), p2b = Draw(&rng, 32);
    cw.dw_w = dww.data();
    cw.dw_b = dwb.data();
    cw.ln_gamma = g.data();
    cw.ln_beta = be.data();
    cw.pw1_w = p1w.data();
    cw.pw1_b = p1b.data();
    cw.pw2_w = p2w.data();
    cw.pw2_b = p2b.data();
    ActTensor fast, slow;
    double pms = TimeMedianMs([&] { ConvNextBlockForward(x, cw, &fast); });
    double sms = TimeMedianMs([&] { ref::ConvNextBlockNaive(x, cw, &slow); });
    Report("convnext_block C=32", sms, pms, MaxDiff(fast.v, slow.v));
  }

  {
    ActTensor x = RandomAct(&rng, 8, 32, 100, 101);
    auto aw = Draw(&rng, size_t(16) * 32), ab = Draw(&rng, 16);
    auto bw = Draw(&rng, size_t(16) * 32), bb = Draw(&rng, 16);
    ActTensor fast, slow;
    double pms = TimeMedianMs([&] {
      TacForward(x, aw.data(), ab.data(), bw.data(), bb.data(), &fast);
    });
    double sms = TimeMedianMs([&] {
      ref::TacNaive(x, aw.data(), ab.data(), bw.data(), bb.data(), &slow);
    });
    Report("tac M=8 C=32", sms, pms, MaxDiff(fast.v, slow.v));

    ActTensor fd, sd;
    double pdm = TimeMedianMs([&] { DacForward(x, &fd); });
    double sdm = TimeMedianMs([&] { ref::DacNaive(x, &sd); });
    Report("dac M=8 C=32", sdm, pdm, MaxDiff(fd.v, sd.v));
  }

  return 0;
}

// tests/test_stft.cpp

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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <functional>

#include "spatialemb/fft.hpp"
#include "spatialemb/ref.hpp"
#include "spatialemb/stft.hpp"
#include "testutil.hpp"

using namespace spatialemb;

namespace {

MultiChannelWave MakeWave(int channels, int64_t samples, float fill = 0.0f) {
  MultiChannelWave w;
  w.num_channels = channels;
  w.num_samples = samples;
  w.sample_rate_hz = 16000;
  w.samples.assign(size_t(channels) * size_t(samples), fill);
  return w;
}

ErrorClass ClassOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.cls();
  }
  FAIL("expected an Error");
  return ErrorClass::kIoError;
}

}  // namespace

TEST_CASE("stft framing: 1 s at 25/10 ms gives T=98, F=201") {
  MultiChannelWave w = MakeWave(2, 16000);
  Spectrogram s = ComputeStft(w);
  CHECK(s.num_frames == 98);
  CHECK(s.num_bins == 201);
  CHECK(s.win_len_samples == 400);
  CHECK(s.hop_samples == 160);
}

TEST_CASE("stft: all-zero wave gives all-zero coefficients") {
  Spectrogram s = ComputeStft(MakeWave(1, 4000));
  for (auto c : s.coeffs) {
    CHECK(c.real() == 0.0f);
    CHECK(c.imag() == 0.0f);
  }
}

TEST_CASE("stft: constant wave, single frame, bin 0 equals Hann sum 200") {
  MultiChannelWave w = MakeWave(1, 400, 1.0f);
  Spectrogram s = ComputeStft(w);
  REQUIRE(s.num_frames == 1);
  auto bin0 = s.Frame(0, 0)[0];
  CHECK(bin0.real() == doctest::Approx(200.0).epsilon(1e-6));
  CHECK(std::abs(bin0.imag()) < 1e-6);

  // Cross-check the same frame against the O(N^2) DFT oracle.
  std::vector<double> window = PeriodicHann(400);
  std::vector<std::complex<double>> in(400);
  for (int i = 0; i < 400; ++i) in[size_t(i)] = window[size_t(i)];
  auto oracle = ref::NaiveDft(in);
  CHECK(std::abs(oracle[0].real() - 200.0) < 1e-9);
  for (int f = 0; f < 201; ++f) {
    CHECK(std::abs(oracle[size_t(f)].real() - s.Frame(0, 0)[f].real()) <
          1e-4);
    CHECK(std::abs(oracle[size_t(f)].imag() - s.Frame(0, 0)[f].imag()) <
          1e-4);
  }
}

TEST_CASE("stft: too-short input") {
  CHECK(ClassOf([&] { ComputeStft(MakeWave(1, 300)); }) ==
        ErrorClass::kTooShort);
}

TEST_CASE("fft matches the brute-force DFT on 100 random frames") {
  SplitMix64 rng(99);
  Fft plan(400);
  double worst = 0.0;
  for (int c = 0; c < 100; ++c) {
    std::vector<std::complex<double>> in(400), out(400);
    for (auto& v : in)
      v = std::complex<double>(rng.NextUniform(-1, 1), rng.NextUniform(-1, 1));
    plan.Transform(in.data(), out.data());
    auto oracle = ref::NaiveDft(in);
    for (int i = 0; i < 400; ++i)
      worst = std::max(worst, std::abs(out[size_t(i)] - oracle[size_t(i)]));
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("fft handles awkward lengths (primes go through Bluestein)") {
  SplitMix64 rng(17);
  for (size_t n : {1ul, 2ul, 97ul, 251ul, 360ul, 1000ul}) {
    Fft plan(n);
    std::vector<std::complex<double>> in(n), out(n);
    for (auto& v : in)
      v = std::complex<double>(rng.NextUniform(-1, 1), rng.NextUniform(-1, 1));
    plan.Transform(in.data(), out.data());
    auto oracle = ref::NaiveDft(in);
    double worst = 0.0;
    for (size_t i = 0; i < n; ++i)
      worst = std::max(worst, std::abs(out[i] - oracle[i]));
    CHECK(worst < 1e-6);

    // Inverse round trip.
    std::vector<std::complex<double>> back(n);
    plan.Inverse(out.data(), back.data());
    double worst_rt = 0.0;
    for (size_t i = 0; i < n; ++i)
      worst_rt = std::max(worst_rt, std::abs(back[i] / double(n) - in[i]));
    CHECK(worst_rt < 1e-9);
  }
}

TEST_CASE("lps point values") {
  Spectrogram s;
  s.num_channels = 1;
  s.num_frames = 1;
  s.num_bins = 3;
  s.coeffs = {{1.0f, 0.0f}, {float(std::exp(1.0)), 0.0f}, {0.0f, 0.0f}};
  FeatureTensor lps = LogPowerSpectrum(s);
  CHECK(lps.data[0] == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(lps.data[1] == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(lps.data[2] == float(std::log(1e-10)));
}

TEST_CASE("lps scaling property: alpha shifts by 2 ln alpha") {
  SplitMix64 rng(31);
  MultiChannelWave w = MakeWave(1, 2000);
  for (auto& v : w.samples) v = float(rng.NextUniform(-0.2, 0.2));
  MultiChannelWave w2 = w;
  const float alpha = 3.0f;
  for (auto& v : w2.samples) v *= alpha;
  FeatureTensor a = LogPowerSpectrum(ComputeStft(w));
  FeatureTensor b = LogPowerSpectrum(ComputeStft(w2));
  const double floor_log = std::log(1e-10);
  double worst = 0.0;
  for (size_t i = 0; i < a.data.size(); ++i) {
    if (a.data[i] <= floor_log + 1e-6 || b.data[i] <= floor_log + 1e-6)
      continue;
    worst = std::max(
        worst, std::abs(double(b.data[i]) - a.data[i] -
                        2.0 * std::log(double(alpha))));
  }
  CHECK(worst < 1e-5);
}

TEST_CASE("mel filter bank: shape, normalization, adjacency") {
  for (int bins : {80, 40}) {
    FilterBank fb = MelFilterBank(201, bins, 16000);
    CHECK(fb.num_input_bins == 201);
    CHECK(fb.num_output_bins == bins);
    CHECK(fb.weights.size() == size_t(201) * bins);

    for (int j = 0; j < bins; ++j) {
      double col = 0.0;
      for (int i = 0; i < 201; ++i) col += fb.Weight(i, j);
      CHECK(col == doctest::Approx(1.0).epsilon(1e-6));
    }
    for (int i = 0; i < 201; ++i) {
      int nz = 0, first = -1, last = -1;
      for (int j = 0; j < bins; ++j)
        if (fb.Weight(i, j) > 0.0f) {
          ++nz;
          if (first < 0) first = j;
          last = j;
        }
      CHECK(nz <= 2);
      if (nz == 2) CHECK(last == first + 1);
    }
    for (float v : fb.weights) CHECK(v >= 0.0f);
  }
  CHECK(ClassOf([&] { MelFilterBank(201, 201, 16000); }) ==
        ErrorClass::kBadShape);
}

TEST_CASE("lfb: floor on silence, identity bank equals lps, naive oracle") {
  SplitMix64 rng(77);
  Spectrogram s;
  s.num_channels = 1;
  s.num_frames = 5;
  s.num_bins = 201;
  s.coeffs.assign(size_t(5) * 201, {0.0f, 0.0f});

  FilterBank fb = MelFilterBank(201, 80, 16000);
  FeatureTensor silent = LogFilterBank(s, fb);
  for (float v : silent.data) CHECK(v == float(std::log(1e-10)));

  for (auto& c : s.coeffs)
    c = std::complex<float>(float(rng.NextUniform(-1, 1)),
                            float(rng.NextUniform(-1, 1)));

  FilterBank identity;
  identity.num_input_bins = 201;
  identity.num_output_bins = 201;
  identity.weights.assign(size_t(201) * 201, 0.0f);
  for (int i = 0; i < 201; ++i) identity.weights[size_t(i) * 201 + i] = 1.0f;
  FeatureTensor via_id = LogFilterBank(s, identity);
  FeatureTensor lps = LogPowerSpectrum(s);
  CHECK(testutil::MaxAbsDiff(via_id.data, lps.data) < 1e-6);

  // Naive triple-loop product.
  FeatureTensor fast = LogFilterBank(s, fb);
  double worst = 0.0;
  for (int t = 0; t < 5; ++t)
    for (int j = 0; j < 80; ++j) {
      double acc = 0.0;
      for (int i = 0; i < 201; ++i) {
        auto c = s.Frame(0, t)[i];
        double p = double(c.real()) * c.real() + double(c.imag()) * c.imag();
        acc += p * fb.Weight(i, j);
      }
      double expect = std::log(std::max(acc, 1e-10));
      worst = std::max(
          worst, std::abs(expect - fast.data[size_t(t) * 80 + j]));
    }
  CHECK(worst < 1e-5);

  for (float v : fast.data) CHECK(std::isfinite(v));

  Spectrogram wrong = s;
  wrong.num_bins = 101;
  wrong.coeffs.resize(size_t(5) * 101);
  CHECK(ClassOf([&] { LogFilterBank(wrong, fb); }) ==
        ErrorClass::kShapeMismatch);
}

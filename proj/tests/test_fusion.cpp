// tests/test_fusion.cpp

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

#include <functional>

#include "spatialemb/fusion.hpp"
#include "spatialemb/ref.hpp"
#include "testutil.hpp"

using namespace spatialemb;

namespace {

FeatureTensor RandomSpectral(SplitMix64* rng, int m, int t, int fd) {
  FeatureTensor s({{Axis::kChannel, uint64_t(m)},
                   {Axis::kTime, uint64_t(t)},
                   {Axis::kFreq, uint64_t(fd)}});
  for (auto& v : s.data) v = float(rng->NextUniform(-2.0, 2.0));
  return s;
}

FeatureTensor RandomSf(SplitMix64* rng, int t, int fd) {
  FeatureTensor s({{Axis::kTime, uint64_t(t)}, {Axis::kFreq, uint64_t(fd)}});
  for (auto& v : s.data) v = float(rng->NextUniform(-1.0, 1.0));
  return s;
}

FeatureTensor PermuteSpectral(const FeatureTensor& s,
                              const std::vector<int>& perm) {
  FeatureTensor out = s;
  const size_t plane = size_t(s.Extent(1) * s.Extent(2));
  for (size_t m = 0; m < perm.size(); ++m)
    std::copy(s.data.begin() + size_t(perm[m]) * plane,
              s.data.begin() + size_t(perm[m] + 1) * plane,
              out.data.begin() + m * plane);
  return out;
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

TEST_CASE("fuse_fixed: shapes and channel placement") {
  SplitMix64 rng(1);
  FeatureTensor spectral = RandomSpectral(&rng, 8, 10, 201);
  FeatureTensor sf = RandomSf(&rng, 10, 201);
  FusedInput fused = FuseFixed(spectral, sf);
  CHECK(fused.layout == InputLayout::kFixed);
  CHECK(fused.data.Extent(0) == 9);
  CHECK(fused.data.Extent(1) == 10);
  CHECK(fused.data.Extent(2) == 201);
  // Channel M holds the spatial plane bit-exactly.
  const size_t plane = size_t(10) * 201;
  for (size_t i = 0; i < plane; ++i)
    CHECK(fused.data.data[8 * plane + i] == sf.data[i]);

  FeatureTensor mono = RandomSpectral(&rng, 1, 10, 201);
  CHECK(FuseFixed(mono, sf).data.Extent(0) == 2);

  FeatureTensor bad_sf = RandomSf(&rng, 9, 201);
  CHECK(ClassOf([&] { FuseFixed(spectral, bad_sf); }) ==
        ErrorClass::kShapeMismatch);
}

TEST_CASE("project_sf: normalized ones, identity, naive oracle") {
  SplitMix64 rng(2);
  FilterBank fb = MelFilterBank(201, 40, 16000);

  FeatureTensor ones({{Axis::kTime, 6}, {Axis::kFreq, 201}});
  for (auto& v : ones.data) v = 1.0f;
  FeatureTensor p = ProjectSpatialFeature(ones, fb);
  CHECK(p.Extent(1) == 40);
  for (float v : p.data) CHECK(v == doctest::Approx(1.0).epsilon(1e-6));

  FilterBank identity;
  identity.num_input_bins = 201;
  identity.num_output_bins = 201;
  identity.weights.assign(size_t(201) * 201, 0.0f);
  for (int i = 0; i < 201; ++i) identity.weights[size_t(i) * 201 + i] = 1.0f;
  FeatureTensor sf = RandomSf(&rng, 6, 201);
  FeatureTensor same = ProjectSpatialFeature(sf, identity);
  CHECK(testutil::MaxAbsDiff(same.data, sf.data) < 1e-7);

  FeatureTensor proj = ProjectSpatialFeature(sf, fb);
  double worst = 0.0;
  for (int t = 0; t < 6; ++t)
    for (int j = 0; j < 40; ++j) {
      double acc = 0.0;
      for (int i = 0; i < 201; ++i)
        acc += double(sf.data[size_t(t) * 201 + i]) * fb.Weight(i, j);
      worst = std::max(worst,
                       std::abs(acc - proj.data[size_t(t) * 40 + j]));
    }
  CHECK(worst < 1e-5);
  // Column-normalized weights keep a [-1,1] input inside [-1,1].
  for (float v : proj.data) {
    CHECK(v >= -1.0f - 1e-6f);
    CHECK(v <= 1.0f + 1e-6f);
  }
}

TEST_CASE("squeeze: single channel, averages, determinism") {
  SplitMix64 rng(3);
  FeatureTensor one = RandomSpectral(&rng, 1, 4, 6);
  for (auto method :
       {SqueezeMethod::kFixedChannel, SqueezeMethod::kRandomChannel,
        SqueezeMethod::kChannelAverage,
        SqueezeMethod::kCrossChannelAttention}) {
    FeatureTensor s = SqueezeSpectral(one, method, 9);
    CHECK(testutil::MaxAbsDiff(s.data, one.data) < 1e-6);
  }

  // Identical channels: the average is any channel.
  FeatureTensor same({{Axis::kChannel, 3}, {Axis::kTime, 4}, {Axis::kFreq, 6}});
  FeatureTensor chan = RandomSpectral(&rng, 1, 4, 6);
  for (int m = 0; m < 3; ++m)
    std::copy(chan.data.begin(), chan.data.end(),
              same.data.begin() + size_t(m) * 24);
  FeatureTensor avg =
      SqueezeSpectral(same, SqueezeMethod::kChannelAverage, 0);
  CHECK(testutil::MaxAbsDiff(avg.data, chan.data) < 1e-6);

  // fixed_ch picks channel 0; random_ch is deterministic per seed.
  FeatureTensor multi = RandomSpectral(&rng, 5, 4, 6);
  FeatureTensor fixed =
      SqueezeSpectral(multi, SqueezeMethod::kFixedChannel, 0);
  for (size_t i = 0; i < 24; ++i) CHECK(fixed.data[i] == multi.data[i]);
  FeatureTensor r1 = SqueezeSpectral(multi, SqueezeMethod::kRandomChannel, 4);
  FeatureTensor r2 = SqueezeSpectral(multi, SqueezeMethod::kRandomChannel, 4);
  CHECK(r1.data == r2.data);
}

TEST_CASE("squeeze: cca against the naive per-frame attention loop") {
  SplitMix64 rng(4);
  FeatureTensor x = RandomSpectral(&rng, 3, 4, 6);
  FeatureTensor fast =
      SqueezeSpectral(x, SqueezeMethod::kCrossChannelAttention, 0);
  FeatureTensor slow = ref::CcaSqueezeNaive(x);
  CHECK(testutil::MaxAbsDiff(fast.data, slow.data) < 1e-5);
}

TEST_CASE("squeeze: permutation behaviour") {
  SplitMix64 rng(5);
  FeatureTensor x = RandomSpectral(&rng, 4, 3, 5);
  std::vector<int> perm = {2, 0, 3, 1};
  FeatureTensor px = PermuteSpectral(x, perm);

  FeatureTensor a1 = SqueezeSpectral(x, SqueezeMethod::kChannelAverage, 0);
  FeatureTensor a2 = SqueezeSpectral(px, SqueezeMethod::kChannelAverage, 0);
  CHECK(testutil::MaxAbsDiff(a1.data, a2.data) < 1e-6);

  FeatureTensor c1 =
      SqueezeSpectral(x, SqueezeMethod::kCrossChannelAttention, 0);
  FeatureTensor c2 =
      SqueezeSpectral(px, SqueezeMethod::kCrossChannelAttention, 0);
  CHECK(testutil::MaxAbsDiff(c1.data, c2.data) < 1e-6);

  // fixed_ch equivariance: on the permuted input it selects perm[0].
  FeatureTensor f2 = SqueezeSpectral(px, SqueezeMethod::kFixedChannel, 0);
  const size_t plane = 15;
  for (size_t i = 0; i < plane; ++i)
    CHECK(f2.data[i] == x.data[size_t(perm[0]) * plane + i]);
}

TEST_CASE("expand: copies and layout") {
  SplitMix64 rng(6);
  FeatureTensor spectral = RandomSpectral(&rng, 8, 5, 7);
  FeatureTensor sf = RandomSf(&rng, 5, 7);
  FusedInput e = ExpandSpatial(spectral, sf);
  CHECK(e.layout == InputLayout::kExpanded);
  CHECK(e.data.Extent(0) == 8);
  CHECK(e.data.Extent(1) == 2);
  CHECK(e.data.Extent(2) == 5);
  CHECK(e.data.Extent(3) == 7);

  const size_t plane = 35;
  for (int m = 0; m < 8; ++m) {
    for (size_t i = 0; i < plane; ++i) {
      CHECK(e.data.data[(size_t(m) * 2) * plane + i] ==
            spectral.data[size_t(m) * plane + i]);
      CHECK(e.data.data[(size_t(m) * 2 + 1) * plane + i] == sf.data[i]);
    }
  }

  // M=1 expanded covers the same numbers as fixed with M=1.
  FeatureTensor mono = RandomSpectral(&rng, 1, 5, 7);
  FusedInput ex = ExpandSpatial(mono, sf);
  FusedInput fx = FuseFixed(mono, sf);
  CHECK(ex.data.data == fx.data.data);
}

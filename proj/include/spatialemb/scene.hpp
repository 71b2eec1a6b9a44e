// include/spatialemb/scene.hpp

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

#ifndef SPATIALEMB_SCENE_HPP_
#define SPATIALEMB_SCENE_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spatialemb/spatial.hpp"
#include "spatialemb/tensor.hpp"
#include "spatialemb/wave.hpp"

namespace spatialemb {

// Far-field delay-only source model: each channel receives the source signal
// shifted by a per-channel fractional delay (applied as a frequency-domain
// linear-phase shift, i.e. circularly).
struct SourceSpec {
  bool is_target = false;
  enum class Signal { kNoise, kTones } signal = Signal::kNoise;
  std::vector<double> tone_hz;    // for kTones
  double amplitude = 0.25;        // gain applied to the unit-RMS signal
  std::optional<double> snr_db;   // interferers: overrides amplitude so the
                                  // source sits at this SNR vs the target
  std::vector<double> delay_samples;  // one per channel, fractional allowed
};

struct SceneSpec {
  int num_channels = 0;
  double duration_s = 0.0;  // >= 0.5
  uint64_t seed = 0;
  std::vector<SourceSpec> sources;

  void Validate() const;
};

// Per-bin dominance labels: +1 target, -1 interferer, 0 mixed. A bin is
// target-dominated when target power exceeds interferer power by > 10 dB,
// interferer-dominated below -10 dB.
struct DominanceMask {
  int num_frames = 0;
  int num_bins = 0;
  std::vector<int8_t> labels;  // [T, F]

  int8_t At(int t, int f) const { return labels[size_t(t) * num_bins + f]; }
};

constexpr double kDominanceThresholdDb = 10.0;

struct SceneRender {
  MultiChannelWave mixture;
  MultiChannelWave target_solo;
  DominanceMask mask;
  // Scaled per-source channel waves, summing sample-wise to the mixture.
  std::vector<MultiChannelWave> source_waves;
};

SceneRender Synthesize(const SceneSpec& scene);

// Encodes the mask as a [time, freq] float tensor (+1/-1/0).
FeatureTensor MaskToTensor(const DominanceMask& mask);

// key=value scene config, [scene] and repeated [source] sections.
SceneSpec ParseSceneConfig(const std::string& path);
SceneSpec ParseSceneConfigText(const std::string& text);

enum class KernelSource { kTarget, kInterferer };

struct SfSeparation {
  double mean_sf_target = 0.0;
  double mean_sf_interferer = 0.0;
  size_t num_target_bins = 0;
  size_t num_interferer_bins = 0;
};

// Full pipeline on a synthetic scene: stft -> kernel from the solo segment
// (last `kernel_frames` frames) -> RP -> all-pairs SF, averaged per mask
// class. `source` picks whose solo supplies the kernel.
SfSeparation ComputeSfSeparation(const SceneSpec& scene,
                                 KernelSource source = KernelSource::kTarget,
                                 int kernel_frames = kDefaultKernelFrames);

}  // namespace spatialemb

#endif  // SPATIALEMB_SCENE_HPP_

// include/spatialemb/config.hpp

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

#ifndef SPATIALEMB_CONFIG_HPP_
#define SPATIALEMB_CONFIG_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "spatialemb/embedding.hpp"
#include "spatialemb/fusion.hpp"

namespace spatialemb {

// One [section] of a key=value config file; sections may repeat.
struct ConfigSection {
  std::string name;
  std::map<std::string, std::string> values;

  bool Has(const std::string& key) const { return values.count(key) > 0; }
  std::string GetString(const std::string& key,
                        const std::string& fallback = "") const;
  double GetDouble(const std::string& key, double fallback) const;
  int64_t GetInt(const std::string& key, int64_t fallback) const;
  std::vector<double> GetDoubleList(const std::string& key) const;
};

std::vector<ConfigSection> ParseKeyValueFile(const std::string& path);
std::vector<ConfigSection> ParseKeyValueText(const std::string& text);

enum class FeatureKind { kLps201, kLfb80, kLfb40 };
const char* FeatureKindName(FeatureKind f);
FeatureKind ParseFeatureKind(const std::string& s);
int FeatureDim(FeatureKind f);

// Everything the extract/embed/bench subcommands need; populated from a
// [run] config section, then overridden by command-line flags.
struct RunConfig {
  FeatureKind feature = FeatureKind::kLps201;
  InputLayout topology = InputLayout::kFixed;
  SqueezeMethod squeeze_method = SqueezeMethod::kChannelAverage;
  ChannelFusion fusion = ChannelFusion::kNone;
  Structure structure = Structure::kConv2d;
  std::string version = "S";  // S | L | D | L,D | L' | L',D | sub
  std::optional<std::array<int, 3>> channels_override;
  std::optional<int> blocks_override;
  int final_dim = 256;
  int kernel_frames = 10;  // K
  uint64_t seed = 0;

  void LoadSection(const ConfigSection& s);
  // Resolves version string + overrides into a full EmbeddingSpec for a
  // given microphone count; validates the combination.
  EmbeddingSpec BuildEmbeddingSpec(int num_mics) const;
};

// Maps Table-style version markings to (channels, blocks, entry flavor).
struct VersionInfo {
  std::array<int, 3> channels;
  int blocks;
  bool freq_subsample_entry;
};
VersionInfo ResolveVersion(Structure structure, const std::string& version);

}  // namespace spatialemb

#endif  // SPATIALEMB_CONFIG_HPP_

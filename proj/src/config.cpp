// src/config.cpp

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

#include "spatialemb/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace spatialemb {

namespace {

std::string Trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

std::string ConfigSection::GetString(const std::string& key,
                                     const std::string& fallback) const {
  auto it = values.find(key);
  return it == values.end() ? fallback : it->second;
}

double ConfigSection::GetDouble(const std::string& key,
                                double fallback) const {
  auto it = values.find(key);
  if (it == values.end()) return fallback;
  try {
    size_t pos = 0;
    double v = std::stod(it->second, &pos);
    Require(pos == it->second.size(), ErrorClass::kBadConfig,
            "bad number for " + key + ": " + it->second);
    return v;
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    Throw(ErrorClass::kBadConfig, "bad number for " + key + ": " + it->second);
  }
}

int64_t ConfigSection::GetInt(const std::string& key, int64_t fallback) const {
  auto it = values.find(key);
  if (it == values.end()) return fallback;
  try {
    size_t pos = 0;
    int64_t v = std::stoll(it->second, &pos);
    Require(pos == it->second.size(), ErrorClass::kBadConfig,
            "bad integer for " + key + ": " + it->second);
    return v;
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    Throw(ErrorClass::kBadConfig,
          "bad integer for " + key + ": " + it->second);
  }
}

std::vector<double> ConfigSection::GetDoubleList(const std::string& key) const {
  std::vector<double> out;
  auto it = values.find(key);
  if (it == values.end()) return out;
  std::stringstream ss(it->second);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = Trim(tok);
    if (tok.empty()) continue;
    try {
      out.push_back(std::stod(tok));
    } catch (const std::exception&) {
      Throw(ErrorClass::kBadConfig, "bad list entry for " + key + ": " + tok);
    }
  }
  return out;
}

std::vector<ConfigSection> ParseKeyValueText(const std::string& text) {
  std::vector<ConfigSection> sections;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::string t = Trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      Require(t.back() == ']', ErrorClass::kBadConfig,
              "unterminated section header at line " + std::to_string(lineno));
      ConfigSection sec;
      sec.name = Trim(t.substr(1, t.size() - 2));
      sections.push_back(std::move(sec));
      continue;
    }
    auto eq = t.find('=');
    Require(eq != std::string::npos, ErrorClass::kBadConfig,
            "expected key=value at line " + std::to_string(lineno));
    Require(!sections.empty(), ErrorClass::kBadConfig,
            "key=value before any [section] at line " +
                std::to_string(lineno));
    std::string key = Trim(t.substr(0, eq));
    std::string val = Trim(t.substr(eq + 1));
    Require(!key.empty(), ErrorClass::kBadConfig,
            "empty key at line " + std::to_string(lineno));
    sections.back().values[key] = val;
  }
  return sections;
}

std::vector<ConfigSection> ParseKeyValueFile(const std::string& path) {
  std::ifstream is(path);
  if (!is) Throw(ErrorClass::kIoError, "cannot open: " + path);
  std::string text((std::istreambuf_iterator<char>(is)),
                   std::istreambuf_iterator<char>());
  return ParseKeyValueText(text);
}

const char* FeatureKindName(FeatureKind f) {
  switch (f) {
    case FeatureKind::kLps201: return "lps201";
    case FeatureKind::kLfb80: return "lfb80";
    case FeatureKind::kLfb40: return "lfb40";
  }
  return "?";
}

FeatureKind ParseFeatureKind(const std::string& s) {
  if (s == "lps201") return FeatureKind::kLps201;
  if (s == "lfb80") return FeatureKind::kLfb80;
  if (s == "lfb40") return FeatureKind::kLfb40;
  Throw(ErrorClass::kBadConfig, "unknown feature kind: " + s);
}

int FeatureDim(FeatureKind f) {
  switch (f) {
    case FeatureKind::kLps201: return 201;
    case FeatureKind::kLfb80: return 80;
    case FeatureKind::kLfb40: return 40;
  }
  return 0;
}

VersionInfo ResolveVersion(Structure structure, const std::string& version) {
  std::string v = version;
  std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) {
    return char(std::tolower(c));
  });
  v.erase(std::remove_if(v.begin(), v.end(),
                         [](unsigned char c) { return c == ' '; }),
          v.end());

  const std::array<int, 3> small = {16, 32, 128};
  const std::array<int, 3> large = {64, 128, 184};

  if (v == "s") return {small, 1, false};
  if (v == "l") return {large, 1, false};
  if (v == "sub") {
    Require(structure == Structure::kConv2d, ErrorClass::kBadConfig,
            "version 'sub' applies to the conv2d structure");
    return {small, 1, true};
  }
  if (v == "d") {
    // Deep: more blocks; the gru variant also widens the middle stage.
    if (structure == Structure::kGruConv2d) return {{16, 64, 128}, 2, false};
    return {small, 3, false};
  }
  if (v == "l,d" || v == "ld") {
    if (structure == Structure::kGruConv2d) return {large, 2, false};
    return {large, 3, false};
  }
  if (v == "l'") return {{32, 128, 184}, 1, false};
  if (v == "l',d" || v == "l'd") {
    Require(structure == Structure::kGruConv2d, ErrorClass::kBadConfig,
            "version L',D applies to the gru_conv2d structure");
    return {{32, 128, 184}, 2, false};
  }
  Throw(ErrorClass::kBadConfig, "unknown version: " + version);
}

void RunConfig::LoadSection(const ConfigSection& s) {
  if (s.Has("feature")) feature = ParseFeatureKind(s.GetString("feature"));
  if (s.Has("topology")) topology = ParseInputLayout(s.GetString("topology"));
  if (s.Has("squeeze_method"))
    squeeze_method = ParseSqueezeMethod(s.GetString("squeeze_method"));
  if (s.Has("fusion")) fusion = ParseChannelFusion(s.GetString("fusion"));
  if (s.Has("structure")) structure = ParseStructure(s.GetString("structure"));
  if (s.Has("version")) version = s.GetString("version");
  if (s.Has("channels")) {
    auto list = s.GetDoubleList("channels");
    Require(list.size() == 3, ErrorClass::kBadConfig,
            "channels needs exactly three values");
    channels_override = {int(list[0]), int(list[1]), int(list[2])};
  }
  if (s.Has("blocks")) blocks_override = int(s.GetInt("blocks", 1));
  if (s.Has("final_dim")) final_dim = int(s.GetInt("final_dim", 256));
  if (s.Has("k")) kernel_frames = int(s.GetInt("k", 10));
  if (s.Has("seed")) seed = uint64_t(s.GetInt("seed", 0));
}

EmbeddingSpec RunConfig::BuildEmbeddingSpec(int num_mics) const {
  VersionInfo info = ResolveVersion(structure, version);
  EmbeddingSpec spec;
  spec.structure = structure;
  spec.out_channels = channels_override.value_or(info.channels);
  spec.num_blocks = blocks_override.value_or(info.blocks);
  spec.feature_dim = FeatureDim(feature);
  spec.topology = topology;
  spec.fusion = fusion;
  spec.final_dim = final_dim;
  spec.num_mics = num_mics;
  spec.freq_subsample_entry = info.freq_subsample_entry;
  spec.Validate();
  return spec;
}

}  // namespace spatialemb

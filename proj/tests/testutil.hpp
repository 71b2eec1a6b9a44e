// tests/testutil.hpp

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

#ifndef SPATIALEMB_TESTS_TESTUTIL_HPP_
#define SPATIALEMB_TESTS_TESTUTIL_HPP_

#include <unistd.h>

#include <atomic>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "spatialemb/rng.hpp"
#include "spatialemb/tensor.hpp"

namespace testutil {

// Unique scratch directory, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<uint64_t> counter{0};
    auto n = counter.fetch_add(1);
    path_ = std::filesystem::temp_directory_path() /
            ("spatialemb_test_" + std::to_string(::getpid()) + "_" +
             std::to_string(n));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  std::string File(const std::string& name) const {
    return (path_ / name).string();
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline std::string ReadBytes(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(is)),
                     std::istreambuf_iterator<char>());
}

inline void WriteBytes(const std::string& path, const std::string& bytes) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  os.write(bytes.data(), std::streamsize(bytes.size()));
}

// Minimal PCM16 WAV writer, independent of the library's writer.
inline void WritePcm16Wav(const std::string& path, int sample_rate,
                          const std::vector<std::vector<int16_t>>& channels) {
  const int m = int(channels.size());
  const size_t n = channels.empty() ? 0 : channels[0].size();
  std::string s;
  auto u16 = [&](uint16_t v) {
    s.push_back(char(v & 0xff));
    s.push_back(char(v >> 8));
  };
  auto u32 = [&](uint32_t v) {
    for (int i = 0; i < 4; ++i) s.push_back(char((v >> (8 * i)) & 0xff));
  };
  uint32_t data_len = uint32_t(n * m * 2);
  s.append("RIFF");
  u32(36 + data_len);
  s.append("WAVE");
  s.append("fmt ");
  u32(16);
  u16(1);  // PCM
  u16(uint16_t(m));
  u32(uint32_t(sample_rate));
  u32(uint32_t(sample_rate * m * 2));
  u16(uint16_t(m * 2));
  u16(16);
  s.append("data");
  u32(data_len);
  for (size_t i = 0; i < n; ++i)
    for (int c = 0; c < m; ++c) u16(uint16_t(channels[size_t(c)][i]));
  WriteBytes(path, s);
}

inline spatialemb::FeatureTensor RandomTensor(spatialemb::SplitMix64* rng,
                                              size_t max_elements = 1000000) {
  using spatialemb::Axis;
  int ndim = 1 + int(rng->Next() % 4);
  std::vector<std::pair<Axis, uint64_t>> dims;
  uint64_t total = 1;
  for (int i = 0; i < ndim; ++i) {
    uint64_t extent = 1 + rng->Next() % 24;
    if (total * extent > max_elements) extent = 1;
    total *= extent;
    dims.emplace_back(Axis(rng->Next() % 5), extent);
  }
  spatialemb::FeatureTensor t(dims);
  for (auto& v : t.data) v = float(rng->NextUniform(-100.0, 100.0));
  return t;
}

inline bool BitwiseEqual(const spatialemb::FeatureTensor& a,
                         const spatialemb::FeatureTensor& b) {
  if (a.dims != b.dims || a.data.size() != b.data.size()) return false;
  return a.data.empty() ||
         std::memcmp(a.data.data(), b.data.data(),
                     a.data.size() * sizeof(float)) == 0;
}

inline double MaxAbsDiff(const std::vector<float>& a,
                         const std::vector<float>& b) {
  double m = 0.0;
  for (size_t i = 0; i < a.size() && i < b.size(); ++i)
    m = std::max(m, std::abs(double(a[i]) - b[i]));
  return m;
}

}  // namespace testutil

#endif  // SPATIALEMB_TESTS_TESTUTIL_HPP_

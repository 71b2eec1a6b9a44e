// src/wav_io.cpp

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

#include "spatialemb/wav_io.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <vector>

#include "spatialemb/common.hpp"

namespace spatialemb {

void MultiChannelWave::Validate() const {
  Require(num_channels >= 1 && num_channels <= kMaxChannels,
          ErrorClass::kUnsupportedEncoding,
          "channel count " + std::to_string(num_channels));
  Require(num_samples >= 1, ErrorClass::kEmptyFile, "no samples");
  Require(samples.size() == size_t(num_channels) * size_t(num_samples),
          ErrorClass::kShapeMismatch, "sample buffer size mismatch");
  Require(sample_rate_hz == kPipelineSampleRate,
          ErrorClass::kSampleRateMismatch,
          "sample rate " + std::to_string(sample_rate_hz) + " != 16000");
  for (float v : samples)
    Require(v >= -1.0f && v <= 1.0f, ErrorClass::kShapeMismatch,
            "sample out of [-1, 1]");
}

namespace {

constexpr uint16_t kFormatPcm = 1;
constexpr uint16_t kFormatFloat = 3;

struct ByteReader {
  const std::string& buf;
  size_t pos = 0;

  void Need(size_t n) const {
    if (pos + n > buf.size())
      Throw(ErrorClass::kTruncatedPayload, "WAV file truncated");
  }
  uint16_t U16() {
    Need(2);
    uint16_t v = uint16_t(uint8_t(buf[pos])) |
                 (uint16_t(uint8_t(buf[pos + 1])) << 8);
    pos += 2;
    return v;
  }
  uint32_t U32() {
    Need(4);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
      v |= uint32_t(uint8_t(buf[pos + i])) << (8 * i);
    pos += 4;
    return v;
  }
  std::string Tag() {
    Need(4);
    std::string t = buf.substr(pos, 4);
    pos += 4;
    return t;
  }
  void Skip(size_t n) {
    Need(n);
    pos += n;
  }
};

void PutU16(std::string* s, uint16_t v) {
  s->push_back(char(v & 0xff));
  s->push_back(char(v >> 8));
}

void PutU32(std::string* s, uint32_t v) {
  for (int i = 0; i < 4; ++i) s->push_back(char((v >> (8 * i)) & 0xff));
}

}  // namespace

MultiChannelWave ReadWav(const std::string& path, std::optional<int> channel) {
  std::ifstream is(path, std::ios::binary);
  if (!is) Throw(ErrorClass::kIoError, "cannot open: " + path);
  std::string buf((std::istreambuf_iterator<char>(is)),
                  std::istreambuf_iterator<char>());
  if (buf.empty()) Throw(ErrorClass::kEmptyFile, "0-byte file: " + path);

  ByteReader r{buf};
  if (r.Tag() != "RIFF") Throw(ErrorClass::kBadMagic, "not a RIFF file");
  r.U32();  // riff size, unchecked against actual length
  if (r.Tag() != "WAVE") Throw(ErrorClass::kBadMagic, "not a WAVE file");

  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t sample_rate = 0;
  bool have_fmt = false;
  size_t data_pos = 0, data_len = 0;

  while (r.pos + 8 <= buf.size()) {
    std::string tag = r.Tag();
    uint32_t len = r.U32();
    if (tag == "fmt ") {
      ByteReader f{buf, r.pos};
      format = f.U16();
      channels = f.U16();
      sample_rate = f.U32();
      f.U32();  // byte rate
      f.U16();  // block align
      bits = f.U16();
      have_fmt = true;
    } else if (tag == "data") {
      data_pos = r.pos;
      data_len = len;
    }
    r.Skip(len + (len & 1));  // chunks are word-aligned
    if (have_fmt && data_pos) break;
  }

  Require(have_fmt, ErrorClass::kBadMagic, "missing fmt chunk");
  Require(data_pos != 0, ErrorClass::kEmptyFile, "missing data chunk");
  Require(channels >= 1 && channels <= kMaxChannels,
          ErrorClass::kUnsupportedEncoding,
          "channel count " + std::to_string(channels));
  if (!(format == kFormatPcm && bits == 16) &&
      !(format == kFormatFloat && bits == 32))
    Throw(ErrorClass::kUnsupportedEncoding,
          "format " + std::to_string(format) + "/" + std::to_string(bits) +
              "-bit (want PCM16 or float32)");
  Require(int(sample_rate) == kPipelineSampleRate,
          ErrorClass::kSampleRateMismatch,
          "sample rate " + std::to_string(sample_rate) + " != 16000");

  size_t bytes_per_sample = bits / 8;
  size_t frame_bytes = bytes_per_sample * channels;
  Require(data_len > 0 && data_len >= frame_bytes, ErrorClass::kEmptyFile,
          "empty data chunk");
  if (data_pos + data_len > buf.size())
    Throw(ErrorClass::kTruncatedPayload, "data chunk exceeds file size");
  size_t num_frames = data_len / frame_bytes;

  if (channel.has_value())
    Require(*channel >= 0 && *channel < channels,
            ErrorClass::kBadChannelIndex,
            "channel " + std::to_string(*channel));

  MultiChannelWave wave;
  wave.sample_rate_hz = int(sample_rate);
  wave.num_samples = int64_t(num_frames);
  wave.num_channels = channel.has_value() ? 1 : channels;
  wave.samples.resize(size_t(wave.num_channels) * num_frames);

  const char* data = buf.data() + data_pos;
  for (size_t n = 0; n < num_frames; ++n) {
    for (int c = 0; c < channels; ++c) {
      int out_c = channel.has_value() ? (*channel == c ? 0 : -1) : c;
      if (out_c < 0) continue;
      const char* p = data + n * frame_bytes + c * bytes_per_sample;
      float v;
      if (format == kFormatPcm) {
        int16_t s;
        std::memcpy(&s, p, 2);
        v = float(s) / 32768.0f;
      } else {
        std::memcpy(&v, p, 4);
        v = std::clamp(v, -1.0f, 1.0f);
      }
      wave.samples[size_t(out_c) * num_frames + n] = v;
    }
  }
  wave.Validate();
  return wave;
}

void WriteWav(const std::string& path, const MultiChannelWave& wave) {
  wave.Validate();
  uint32_t num_frames = uint32_t(wave.num_samples);
  uint16_t channels = uint16_t(wave.num_channels);
  uint32_t data_len = num_frames * channels * 4;

  std::string s;
  s.reserve(58 + data_len);
  s.append("RIFF");
  PutU32(&s, 50 + data_len);  // fmt(16+8) + fact(4+8) + data hdr(8) + "WAVE"
  s.append("WAVE");
  s.append("fmt ");
  PutU32(&s, 16);
  PutU16(&s, kFormatFloat);
  PutU16(&s, channels);
  PutU32(&s, uint32_t(wave.sample_rate_hz));
  PutU32(&s, uint32_t(wave.sample_rate_hz) * channels * 4);  // byte rate
  PutU16(&s, channels * 4);                                  // block align
  PutU16(&s, 32);
  s.append("fact");
  PutU32(&s, 4);
  PutU32(&s, num_frames);
  s.append("data");
  PutU32(&s, data_len);
  for (uint32_t n = 0; n < num_frames; ++n) {
    for (int c = 0; c < channels; ++c) {
      float v = wave.samples[size_t(c) * num_frames + n];
      uint32_t bits;
      std::memcpy(&bits, &v, 4);
      PutU32(&s, bits);
    }
  }

  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) Throw(ErrorClass::kIoError, "cannot open for write: " + path);
  os.write(s.data(), std::streamsize(s.size()));
  if (!os) Throw(ErrorClass::kIoError, "write failed: " + path);
}

}  // namespace spatialemb

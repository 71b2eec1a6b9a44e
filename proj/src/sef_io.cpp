// src/sef_io.cpp

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

#include "spatialemb/sef_io.hpp"

#include <cstring>
#include <fstream>

#include "spatialemb/common.hpp"

namespace spatialemb {

namespace {

constexpr char kMagic[4] = {'S', 'E', 'F', '1'};
constexpr uint8_t kDtypeF32 = 0;

void PutU8(std::string* buf, uint8_t v) { buf->push_back(char(v)); }

void PutU16(std::string* buf, uint16_t v) {
  buf->push_back(char(v & 0xff));
  buf->push_back(char((v >> 8) & 0xff));
}

void PutU64(std::string* buf, uint64_t v) {
  for (int i = 0; i < 8; ++i) buf->push_back(char((v >> (8 * i)) & 0xff));
}

void PutF32(std::string* buf, float v) {
  uint32_t bits;
  std::memcpy(&bits, &v, 4);
  for (int i = 0; i < 4; ++i) buf->push_back(char((bits >> (8 * i)) & 0xff));
}

struct Reader {
  std::istream& is;
  uint8_t U8() {
    int c = is.get();
    if (c == EOF) Throw(ErrorClass::kTruncatedPayload, "unexpected EOF");
    return uint8_t(c);
  }
  uint16_t U16() {
    uint16_t v = U8();
    v |= uint16_t(U8()) << 8;
    return v;
  }
  uint64_t U64() {
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= uint64_t(U8()) << (8 * i);
    return v;
  }
};

}  // namespace

void WriteFeatureStream(std::ostream& os, const FeatureTensor& t) {
  Require(!t.dims.empty(), ErrorClass::kShapeMismatch, "dims must be non-empty");
  Require(t.dims.size() <= kMaxTensorNdim, ErrorClass::kDimOverflow,
          "ndim exceeds 8");
  t.Validate();

  std::string buf;
  buf.reserve(8 + 9 * t.dims.size() + 4 * t.data.size());
  buf.append(kMagic, 4);
  PutU8(&buf, kDtypeF32);
  PutU8(&buf, uint8_t(t.dims.size()));
  PutU16(&buf, 0);  // reserved
  for (const auto& [axis, extent] : t.dims) {
    PutU8(&buf, uint8_t(axis));
    PutU64(&buf, extent);
  }
  for (float v : t.data) PutF32(&buf, v);
  os.write(buf.data(), std::streamsize(buf.size()));
  if (!os) Throw(ErrorClass::kIoError, "write failed");
}

FeatureTensor ReadFeatureStream(std::istream& is) {
  char magic[4];
  is.read(magic, 4);
  if (is.gcount() < 4) Throw(ErrorClass::kTruncatedPayload, "file too small");
  if (std::memcmp(magic, kMagic, 4) != 0)
    Throw(ErrorClass::kBadMagic, "magic bytes are not SEF1");

  Reader r{is};
  uint8_t dtype = r.U8();
  if (dtype != kDtypeF32)
    Throw(ErrorClass::kUnsupportedEncoding,
          "dtype code " + std::to_string(dtype));
  uint8_t ndim = r.U8();
  if (ndim == 0 || ndim > kMaxTensorNdim)
    Throw(ErrorClass::kDimOverflow, "ndim " + std::to_string(ndim));
  uint16_t reserved = r.U16();
  if (reserved != 0)
    Throw(ErrorClass::kBadMagic, "reserved field is nonzero");

  FeatureTensor t;
  for (int i = 0; i < ndim; ++i) {
    uint8_t axis = r.U8();
    if (axis > uint8_t(Axis::kBin))
      Throw(ErrorClass::kShapeMismatch, "unknown axis code");
    uint64_t extent = r.U64();
    t.dims.emplace_back(Axis(axis), extent);
  }
  uint64_t n = CheckedNumEl(t.dims);
  if (n > (uint64_t(1) << 33))
    Throw(ErrorClass::kDimOverflow, "payload too large");

  t.data.resize(size_t(n));
  std::string payload(size_t(n) * 4, '\0');
  is.read(payload.data(), std::streamsize(payload.size()));
  if (size_t(is.gcount()) != payload.size())
    Throw(ErrorClass::kTruncatedPayload, "payload shorter than header claims");
  for (size_t i = 0; i < size_t(n); ++i) {
    uint32_t bits = 0;
    for (int b = 0; b < 4; ++b)
      bits |= uint32_t(uint8_t(payload[i * 4 + b])) << (8 * b);
    std::memcpy(&t.data[i], &bits, 4);
  }
  return t;
}

void WriteFeature(const std::string& path, const FeatureTensor& t) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) Throw(ErrorClass::kIoError, "cannot open for write: " + path);
  WriteFeatureStream(os, t);
}

FeatureTensor ReadFeature(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) Throw(ErrorClass::kIoError, "cannot open: " + path);
  FeatureTensor t = ReadFeatureStream(is);
  // A stray byte after the payload means the file is not a single tensor.
  if (is.peek() != EOF)
    Throw(ErrorClass::kTruncatedPayload, "trailing bytes after payload");
  return t;
}

}  // namespace spatialemb

// src/tensor.cpp

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

#include "spatialemb/tensor.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace spatialemb {

const char* AxisName(Axis a) {
  switch (a) {
    case Axis::kChannel: return "channel";
    case Axis::kFeatChannel: return "feat_channel";
    case Axis::kTime: return "time";
    case Axis::kFreq: return "freq";
    case Axis::kBin: return "bin";
  }
  return "?";
}

uint64_t CheckedNumEl(const std::vector<std::pair<Axis, uint64_t>>& dims) {
  uint64_t n = 1;
  for (const auto& [axis, extent] : dims) {
    (void)axis;
    if (extent != 0 && n > std::numeric_limits<uint64_t>::max() / extent)
      Throw(ErrorClass::kDimOverflow, "extent product overflows u64");
    n *= extent;
  }
  return n;
}

FeatureTensor::FeatureTensor(std::vector<std::pair<Axis, uint64_t>> d,
                             float fill)
    : dims(std::move(d)) {
  if (dims.size() > kMaxTensorNdim)
    Throw(ErrorClass::kDimOverflow, "too many dims");
  uint64_t n = CheckedNumEl(dims);
  if (n > (uint64_t(1) << 33))
    Throw(ErrorClass::kDimOverflow, "tensor too large: " + std::to_string(n));
  data.assign(size_t(n), fill);
}

uint64_t FeatureTensor::NumEl() const { return CheckedNumEl(dims); }

size_t FeatureTensor::Offset(const std::vector<uint64_t>& idx) const {
  Require(idx.size() == dims.size(), ErrorClass::kShapeMismatch,
          "index rank mismatch");
  size_t off = 0;
  for (size_t i = 0; i < idx.size(); ++i) {
    Require(idx[i] < dims[i].second, ErrorClass::kOutOfRange,
            "index out of range on axis " + std::string(AxisName(dims[i].first)));
    off = off * size_t(dims[i].second) + size_t(idx[i]);
  }
  return off;
}

void FeatureTensor::Validate() const {
  Require(!dims.empty(), ErrorClass::kShapeMismatch, "tensor has no dims");
  Require(dims.size() <= kMaxTensorNdim, ErrorClass::kDimOverflow,
          "too many dims");
  Require(CheckedNumEl(dims) == data.size(), ErrorClass::kShapeMismatch,
          "dims do not match element count");
}

void FeatureTensor::CheckFinite(const std::string& what) const {
  for (float v : data) {
    if (!std::isfinite(v))
      Throw(ErrorClass::kShapeMismatch, what + ": non-finite element");
  }
}

std::string FeatureTensor::ShapeString() const {
  std::ostringstream os;
  os << "[";
  for (size_t i = 0; i < dims.size(); ++i) {
    if (i) os << ", ";
    os << AxisName(dims[i].first) << "=" << dims[i].second;
  }
  os << "]";
  return os.str();
}

}  // namespace spatialemb

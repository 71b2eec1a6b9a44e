// include/spatialemb/tensor.hpp

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

#ifndef SPATIALEMB_TENSOR_HPP_
#define SPATIALEMB_TENSOR_HPP_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "spatialemb/common.hpp"

namespace spatialemb {

// Axis roles for feature tensors. Values double as the on-disk axis codes of
// the SEF1 container, so they must not be renumbered.
enum class Axis : uint8_t {
  kChannel = 0,
  kFeatChannel = 1,
  kTime = 2,
  kFreq = 3,
  kBin = 4,
};

const char* AxisName(Axis a);

constexpr int kMaxTensorNdim = 8;

// Dense row-major float32 array with named axes. The workhorse value type of
// the feature pipeline; heavy math uses raw spans into `data`.
struct FeatureTensor {
  std::vector<std::pair<Axis, uint64_t>> dims;
  std::vector<float> data;

  FeatureTensor() = default;
  FeatureTensor(std::vector<std::pair<Axis, uint64_t>> d, float fill = 0.0f);

  size_t Ndim() const { return dims.size(); }
  uint64_t Extent(size_t i) const { return dims[i].second; }
  Axis AxisAt(size_t i) const { return dims[i].first; }
  uint64_t NumEl() const;

  // Row-major offset of an index tuple; bounds-checked.
  size_t Offset(const std::vector<uint64_t>& idx) const;
  float& At(const std::vector<uint64_t>& idx) { return data[Offset(idx)]; }
  float At(const std::vector<uint64_t>& idx) const {
    return data[Offset(idx)];
  }

  // Throws kShapeMismatch unless dims multiply out to data.size().
  void Validate() const;
  // Throws kShapeMismatch if any element is NaN or Inf.
  void CheckFinite(const std::string& what) const;

  std::string ShapeString() const;

  bool SameShape(const FeatureTensor& o) const { return dims == o.dims; }
};

// Extent product with overflow check (kDimOverflow).
uint64_t CheckedNumEl(const std::vector<std::pair<Axis, uint64_t>>& dims);

}  // namespace spatialemb

#endif  // SPATIALEMB_TENSOR_HPP_

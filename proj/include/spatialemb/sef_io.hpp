// include/spatialemb/sef_io.hpp

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

#ifndef SPATIALEMB_SEF_IO_HPP_
#define SPATIALEMB_SEF_IO_HPP_

#include <iosfwd>
#include <string>

#include "spatialemb/tensor.hpp"

namespace spatialemb {

// SEF1 container, little-endian:
//   magic "SEF1" | u8 dtype (0 = float32) | u8 ndim | u16 reserved (0)
//   ndim x { u8 axis code | u64 extent }
//   payload: row-major float32 in listed dim order
// Round trips are bit-exact. ndim is capped at 8.

void WriteFeature(const std::string& path, const FeatureTensor& t);
FeatureTensor ReadFeature(const std::string& path);

// Stream variants; used to pack several tensors back to back (weight files).
void WriteFeatureStream(std::ostream& os, const FeatureTensor& t);
FeatureTensor ReadFeatureStream(std::istream& is);

}  // namespace spatialemb

#endif  // SPATIALEMB_SEF_IO_HPP_

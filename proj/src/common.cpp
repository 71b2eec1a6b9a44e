// src/common.cpp

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

#include "spatialemb/common.hpp"

namespace spatialemb {

const char* ErrorClassName(ErrorClass c) {
  switch (c) {
    case ErrorClass::kUnsupportedEncoding: return "UnsupportedEncoding";
    case ErrorClass::kSampleRateMismatch: return "SampleRateMismatch";
    case ErrorClass::kEmptyFile: return "EmptyFile";
    case ErrorClass::kBadMagic: return "BadMagic";
    case ErrorClass::kDimOverflow: return "DimOverflow";
    case ErrorClass::kTruncatedPayload: return "TruncatedPayload";
    case ErrorClass::kTooShort: return "TooShort";
    case ErrorClass::kBadShape: return "BadShape";
    case ErrorClass::kShapeMismatch: return "ShapeMismatch";
    case ErrorClass::kOutOfRange: return "OutOfRange";
    case ErrorClass::kBadChannelIndex: return "BadChannelIndex";
    case ErrorClass::kNeedTwoChannels: return "NeedTwoChannels";
    case ErrorClass::kOddChannels: return "OddChannels";
    case ErrorClass::kSpecMismatch: return "SpecMismatch";
    case ErrorClass::kBadScene: return "BadScene";
    case ErrorClass::kOutOfMemory: return "OutOfMemory";
    case ErrorClass::kSoloMissing: return "SoloMissing";
    case ErrorClass::kBadConfig: return "BadConfig";
    case ErrorClass::kIoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace spatialemb

// include/spatialemb/common.hpp

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

#ifndef SPATIALEMB_COMMON_HPP_
#define SPATIALEMB_COMMON_HPP_

#include <stdexcept>
#include <string>

namespace spatialemb {

// Every recoverable failure carries one of these classes so callers (and the
// CLI error line on stderr) can dispatch on it without parsing messages.
enum class ErrorClass {
  kUnsupportedEncoding,
  kSampleRateMismatch,
  kEmptyFile,
  kBadMagic,
  kDimOverflow,
  kTruncatedPayload,
  kTooShort,
  kBadShape,
  kShapeMismatch,
  kOutOfRange,
  kBadChannelIndex,
  kNeedTwoChannels,
  kOddChannels,
  kSpecMismatch,
  kBadScene,
  kOutOfMemory,
  kSoloMissing,
  kBadConfig,
  kIoError,
};

const char* ErrorClassName(ErrorClass c);

class Error : public std::runtime_error {
 public:
  Error(ErrorClass cls, const std::string& msg)
      : std::runtime_error(std::string(ErrorClassName(cls)) + ": " + msg),
        cls_(cls) {}
  ErrorClass cls() const { return cls_; }

 private:
  ErrorClass cls_;
};

[[noreturn]] inline void Throw(ErrorClass cls, const std::string& msg) {
  throw Error(cls, msg);
}

inline void Require(bool ok, ErrorClass cls, const std::string& msg) {
  if (!ok) Throw(cls, msg);
}

constexpr int kPipelineSampleRate = 16000;
constexpr int kMaxChannels = 64;

}  // namespace spatialemb

#endif  // SPATIALEMB_COMMON_HPP_

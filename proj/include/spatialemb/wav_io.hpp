// include/spatialemb/wav_io.hpp

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

#ifndef SPATIALEMB_WAV_IO_HPP_
#define SPATIALEMB_WAV_IO_HPP_

#include <optional>
#include <string>

#include "spatialemb/wave.hpp"

namespace spatialemb {

// Reads a RIFF/WAVE file (PCM16 or IEEE float32). PCM16 samples are scaled
// by 1/32768 so that -32768 maps to exactly -1.0. Rejects sample rates other
// than 16 kHz (kSampleRateMismatch) and channel counts outside 1..64.
// If `channel` is given, only that zero-based channel is returned (M == 1).
MultiChannelWave ReadWav(const std::string& path,
                         std::optional<int> channel = std::nullopt);

// Writes `wave` as IEEE float32 WAV (interleaved). Deterministic bytes.
void WriteWav(const std::string& path, const MultiChannelWave& wave);

}  // namespace spatialemb

#endif  // SPATIALEMB_WAV_IO_HPP_

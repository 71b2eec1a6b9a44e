// include/spatialemb/stft.hpp

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

#ifndef SPATIALEMB_STFT_HPP_
#define SPATIALEMB_STFT_HPP_

#include <complex>
#include <vector>

#include "spatialemb/tensor.hpp"
#include "spatialemb/wave.hpp"

namespace spatialemb {

// Complex STFT coefficients, [M, T, F] row-major. F = win_len/2 + 1,
// T = floor((num_samples - win_len) / hop) + 1. Frame t covers samples
// [t*hop, t*hop + win_len); periodic Hann window; DFT length = window
// length; no centering or padding.
struct Spectrogram {
  int num_channels = 0;  // M
  int num_frames = 0;    // T
  int num_bins = 0;      // F
  int win_len_samples = 0;
  int hop_samples = 0;
  int sample_rate_hz = 0;
  std::vector<std::complex<float>> coeffs;  // [M, T, F]

  std::complex<float>* Frame(int m, int t) {
    return coeffs.data() +
           (size_t(m) * num_frames + size_t(t)) * size_t(num_bins);
  }
  const std::complex<float>* Frame(int m, int t) const {
    return coeffs.data() +
           (size_t(m) * num_frames + size_t(t)) * size_t(num_bins);
  }
};

Spectrogram ComputeStft(const MultiChannelWave& wave, double win_len_ms = 25.0,
                        double hop_ms = 10.0);

constexpr double kLogFloor = 1e-10;

// Log power spectrum: ln(max(|Y|^2, floor)), natural log. [M, T, F].
FeatureTensor LogPowerSpectrum(const Spectrogram& spec,
                               double floor_eps = kLogFloor);

// Triangular mel filter bank, [F, F'] with every column (one filter)
// summing to 1. Lower edge 0 Hz, upper edge Nyquist.
struct FilterBank {
  int num_input_bins = 0;   // F
  int num_output_bins = 0;  // F'
  std::vector<float> weights;  // [F, F'] row-major

  float Weight(int f, int fp) const {
    return weights[size_t(f) * num_output_bins + fp];
  }
};

FilterBank MelFilterBank(int num_input_bins, int num_output_bins,
                         int sample_rate_hz);

// Log filter bank features: ln(max(|Y|^2 * FB, floor)). [M, T, F'].
FeatureTensor LogFilterBank(const Spectrogram& spec, const FilterBank& fb,
                            double floor_eps = kLogFloor);

std::vector<double> PeriodicHann(int win_len);

}  // namespace spatialemb

#endif  // SPATIALEMB_STFT_HPP_

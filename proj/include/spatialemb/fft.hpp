// include/spatialemb/fft.hpp

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

#ifndef SPATIALEMB_FFT_HPP_
#define SPATIALEMB_FFT_HPP_

#include <complex>
#include <cstddef>
#include <memory>
#include <vector>

namespace spatialemb {

using cdouble = std::complex<double>;

// Mixed-radix Cooley-Tukey plan for a fixed length. Lengths whose largest
// prime factor exceeds 61 go through Bluestein's algorithm on an internal
// power-of-two plan, so any n >= 1 works. Construction precomputes twiddles;
// Transform() is const and safe to call from multiple threads.
class Fft {
 public:
  explicit Fft(size_t n);

  size_t n() const { return n_; }

  // out[k] = sum_j in[j] * exp(-2*pi*i*j*k/n). out must hold n elements.
  void Transform(const cdouble* in, cdouble* out) const;
  // Unscaled inverse; caller divides by n if needed.
  void Inverse(const cdouble* in, cdouble* out) const;

 private:
  void Recurse(const cdouble* in, cdouble* out, size_t n, size_t stride,
               size_t factor_idx, cdouble* scratch) const;
  void TransformBluestein(const cdouble* in, cdouble* out) const;

  size_t n_;
  std::vector<size_t> factors_;
  std::vector<cdouble> twiddles_;  // exp(-2*pi*i*j/n), j = 0..n-1
  bool use_bluestein_ = false;
  // Bluestein state
  std::vector<cdouble> chirp_;     // exp(-i*pi*j^2/n)
  std::vector<cdouble> b_fft_;     // FFT of the chirp filter
  std::unique_ptr<Fft> pow2_;
};

// Forward FFT of a real signal; returns the n/2+1 one-sided bins.
void RealFftOneSided(const Fft& plan, const double* in,
                     std::vector<cdouble>* out);

}  // namespace spatialemb

#endif  // SPATIALEMB_FFT_HPP_

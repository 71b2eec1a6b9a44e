// src/fft.cpp

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

#include "spatialemb/fft.hpp"

#include <cmath>

#include "spatialemb/common.hpp"

namespace spatialemb {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Largest radix handled by the direct mixed-radix combine. Anything with a
// bigger prime factor goes through Bluestein.
constexpr size_t kMaxDirectRadix = 61;

std::vector<size_t> Factorize(size_t n, bool* small_factors_only) {
  std::vector<size_t> factors;
  *small_factors_only = true;
  for (size_t p = 2; p * p <= n; ++p) {
    while (n % p == 0) {
      factors.push_back(p);
      n /= p;
    }
  }
  if (n > 1) factors.push_back(n);
  for (size_t f : factors)
    if (f > kMaxDirectRadix) *small_factors_only = false;
  return factors;
}

size_t NextPow2(size_t n) {
  size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace

Fft::Fft(size_t n) : n_(n) {
  Require(n >= 1, ErrorClass::kBadShape, "FFT length must be >= 1");
  bool small_only = true;
  factors_ = Factorize(n, &small_only);
  use_bluestein_ = !small_only && n > 1;

  if (!use_bluestein_) {
    twiddles_.resize(n_);
    for (size_t j = 0; j < n_; ++j) {
      double a = -kTwoPi * double(j) / double(n_);
      twiddles_[j] = cdouble(std::cos(a), std::sin(a));
    }
    return;
  }

  // Bluestein: X[k] = chirp[k] * IFFT(FFT(x*chirp) .* FFT(b))[k], where
  // chirp[j] = exp(-i*pi*j^2/n) and b is its conjugate, circularized to a
  // power-of-two length M >= 2n-1. j^2 is reduced mod 2n before scaling to
  // keep the angle accurate for large j.
  size_t m = NextPow2(2 * n_ - 1);
  pow2_ = std::make_unique<Fft>(m);
  chirp_.resize(n_);
  for (size_t j = 0; j < n_; ++j) {
    uint64_t jsq = (uint64_t(j) * uint64_t(j)) % (2 * uint64_t(n_));
    double a = -3.14159265358979323846264338327950288 * double(jsq) /
               double(n_);
    chirp_[j] = cdouble(std::cos(a), std::sin(a));
  }
  std::vector<cdouble> b(m, cdouble(0.0, 0.0));
  b[0] = std::conj(chirp_[0]);
  for (size_t j = 1; j < n_; ++j) {
    b[j] = std::conj(chirp_[j]);
    b[m - j] = b[j];
  }
  b_fft_.resize(m);
  pow2_->Transform(b.data(), b_fft_.data());
}

void Fft::Recurse(const cdouble* in, cdouble* out, size_t n, size_t stride,
                  size_t factor_idx, cdouble* scratch) const {
  if (n == 1) {
    out[0] = in[0];
    return;
  }
  size_t r = factors_[factor_idx];
  size_t m = n / r;
  for (size_t q = 0; q < r; ++q)
    Recurse(in + q * stride, out + q * m, m, stride * r, factor_idx + 1,
            scratch + q * m);
  // Combine: X[kk + p*m] = sum_q w^{(kk+p*m)*q*stride} * Y_q[kk], with the
  // twiddle table indexed mod the top-level length (stride * n == n_).
  for (size_t kk = 0; kk < m; ++kk) {
    for (size_t p = 0; p < r; ++p) {
      size_t k = kk + p * m;
      cdouble acc(0.0, 0.0);
      for (size_t q = 0; q < r; ++q) {
        size_t tw = (k * q * stride) % n_;
        acc += twiddles_[tw] * out[q * m + kk];
      }
      scratch[k] = acc;
    }
  }
  for (size_t k = 0; k < n; ++k) out[k] = scratch[k];
}

void Fft::Transform(const cdouble* in, cdouble* out) const {
  if (n_ == 1) {
    out[0] = in[0];
    return;
  }
  if (use_bluestein_) {
    TransformBluestein(in, out);
    return;
  }
  std::vector<cdouble> scratch(n_);
  Recurse(in, out, n_, 1, 0, scratch.data());
}

void Fft::TransformBluestein(const cdouble* in, cdouble* out) const {
  size_t m = pow2_->n();
  std::vector<cdouble> a(m, cdouble(0.0, 0.0));
  for (size_t j = 0; j < n_; ++j) a[j] = in[j] * chirp_[j];
  std::vector<cdouble> fa(m);
  pow2_->Transform(a.data(), fa.data());
  for (size_t k = 0; k < m; ++k) fa[k] *= b_fft_[k];
  std::vector<cdouble> c(m);
  pow2_->Inverse(fa.data(), c.data());
  double inv_m = 1.0 / double(m);
  for (size_t k = 0; k < n_; ++k) out[k] = c[k] * inv_m * chirp_[k];
}

void Fft::Inverse(const cdouble* in, cdouble* out) const {
  std::vector<cdouble> tmp(n_);
  for (size_t j = 0; j < n_; ++j) tmp[j] = std::conj(in[j]);
  Transform(tmp.data(), out);
  for (size_t j = 0; j < n_; ++j) out[j] = std::conj(out[j]);
}

void RealFftOneSided(const Fft& plan, const double* in,
                     std::vector<cdouble>* out) {
  size_t n = plan.n();
  std::vector<cdouble> cin(n), cout(n);
  for (size_t j = 0; j < n; ++j) cin[j] = cdouble(in[j], 0.0);
  plan.Transform(cin.data(), cout.data());
  out->assign(cout.begin(), cout.begin() + std::ptrdiff_t(n / 2 + 1));
}

}  // namespace spatialemb

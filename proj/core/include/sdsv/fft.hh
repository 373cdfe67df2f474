// core/fft.hh

// Copyright 2026  SDSV Authors
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

#ifndef SDSV_FFT_HH_
#define SDSV_FFT_HH_

#include <complex>
#include <cstddef>
#include <vector>

namespace sdsv {

// In-place iterative radix-2 FFT.  n must be a power of two.
// Self-contained so that spectra are bit-identical run to run.
void fft(std::vector<std::complex<double>>& x, bool inverse = false);

// Power spectrum |X_k|^2 for k = 0..n/2 of a real frame zero-padded to
// n_fft (power of two, n_fft >= frame.size()).
std::vector<double> power_spectrum(const std::vector<double>& frame,
                                   std::size_t n_fft);

// Smallest power of two >= n.
std::size_t next_pow2(std::size_t n);

}  // namespace sdsv

#endif  // SDSV_FFT_HH_

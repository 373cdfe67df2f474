// tests/test_helpers.hh

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

#ifndef SDSV_TESTS_TEST_HELPERS_HH_
#define SDSV_TESTS_TEST_HELPERS_HH_

#include <cmath>
#include <complex>
#include <vector>

#include "sdsv/common.hh"
#include "sdsv/nn.hh"
#include "sdsv/rng.hh"

namespace sdsv::test {

// Quadratic-time DFT, the independent oracle for the in-repo FFT and for
// spectral checks in feature tests.
inline std::vector<std::complex<double>> naive_dft(
    const std::vector<std::complex<double>>& x) {
  const std::size_t n = x.size();
  std::vector<std::complex<double>> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::complex<double> acc(0.0, 0.0);
    for (std::size_t t = 0; t < n; ++t) {
      const double ang = -2.0 * M_PI * static_cast<double>(k * t) /
                         static_cast<double>(n);
      acc += x[t] * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    out[k] = acc;
  }
  return out;
}

inline Matrix random_matrix(Eigen::Index r, Eigen::Index c, Rng& rng,
                            double scale = 1.0) {
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = scale * rng.gaussian();
  return m;
}

inline Vector random_vector(Eigen::Index n, Rng& rng, double scale = 1.0) {
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = scale * rng.gaussian();
  return v;
}

inline FeatureMatrix random_features(int t, int d, Rng& rng) {
  FeatureMatrix f;
  f.frames = random_matrix(t, d, rng);
  return f;
}

inline bool bitwise_equal(const std::vector<ParamRef>& a,
                          const std::vector<ParamRef>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].size() != b[i].size()) return false;
    for (Eigen::Index j = 0; j < a[i].size(); ++j)
      if (a[i].data[j] != b[i].data[j]) return false;
  }
  return true;
}

inline double max_abs_diff(const Vector& a, const Vector& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace sdsv::test

#endif  // SDSV_TESTS_TEST_HELPERS_HH_

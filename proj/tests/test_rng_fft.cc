// tests/test_rng_fft.cc

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

#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "sdsv/fft.hh"
#include "sdsv/rng.hh"
#include "test_helpers.hh"

using namespace sdsv;

TEST_CASE("rng: same seed gives identical streams") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("rng: derived streams differ from parent and each other") {
  Rng a(42);
  Rng c1 = a.derive(1), c2 = a.derive(2), cs = a.derive("shuffle");
  CHECK(c1.next_u64() != c2.next_u64());
  CHECK(c1.next_u64() != cs.next_u64());
}

TEST_CASE("rng: uniform stays in [0,1) and has sane mean") {
  Rng rng(7);
  double sum = 0.0;
  for (int i = 0; i < 20000; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    sum += u;
  }
  CHECK(std::abs(sum / 20000 - 0.5) < 0.01);
}

TEST_CASE("rng: uniform_int covers all values in range") {
  Rng rng(9);
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 7000; ++i) ++counts[rng.uniform_int(7)];
  for (int c : counts) CHECK(c > 700);  // expected 1000 each
}

TEST_CASE("rng: gaussian has near-standard moments") {
  Rng rng(11);
  double s1 = 0.0, s2 = 0.0;
  const int n = 50000;
  for (int i = 0; i < n; ++i) {
    const double g = rng.gaussian();
    s1 += g;
    s2 += g * g;
  }
  CHECK(std::abs(s1 / n) < 0.02);
  CHECK(std::abs(s2 / n - 1.0) < 0.03);
}

TEST_CASE("fft: matches the quadratic DFT oracle") {
  Rng rng(3);
  for (std::size_t n : {8u, 64u, 256u}) {
    std::vector<std::complex<double>> x(n);
    for (auto& v : x) v = {rng.gaussian(), rng.gaussian()};
    auto want = test::naive_dft(x);
    auto got = x;
    fft(got);
    for (std::size_t k = 0; k < n; ++k)
      CHECK(std::abs(got[k] - want[k]) < 1e-9);
  }
}

TEST_CASE("fft: inverse undoes forward") {
  Rng rng(5);
  std::vector<std::complex<double>> x(128);
  for (auto& v : x) v = {rng.gaussian(), rng.gaussian()};
  auto y = x;
  fft(y);
  fft(y, /*inverse=*/true);
  for (std::size_t i = 0; i < x.size(); ++i)
    CHECK(std::abs(y[i] - x[i]) < 1e-10);
}

TEST_CASE("power_spectrum: pure tone concentrates at its bin") {
  const std::size_t n_fft = 512;
  std::vector<double> frame(400);
  const int bin = 32;
  for (std::size_t t = 0; t < n_fft; ++t)
    if (t < frame.size())
      frame[t] = std::cos(2.0 * M_PI * bin * t / static_cast<double>(n_fft));
  const auto ps = power_spectrum(frame, n_fft);
  REQUIRE(ps.size() == n_fft / 2 + 1);
  std::size_t argmax = 0;
  for (std::size_t k = 1; k < ps.size(); ++k)
    if (ps[k] > ps[argmax]) argmax = k;
  CHECK(argmax == bin);
}

TEST_CASE("next_pow2") {
  CHECK(next_pow2(1) == 1);
  CHECK(next_pow2(2) == 2);
  CHECK(next_pow2(3) == 4);
  CHECK(next_pow2(400) == 512);
  CHECK(next_pow2(512) == 512);
}

// tests/test_augment.cc

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
#include <limits>
#include <vector>

#include "sdsv/augment.hh"
#include "sdsv/rng.hh"
#include "test_helpers.hh"

using namespace sdsv;

namespace {

// Start index of a crop inside its source, located by its first row.
// Random features make rows unique with probability 1.
int find_start(const FeatureMatrix& src, const FeatureMatrix& crop) {
  for (Eigen::Index t = 0; t + crop.frames.rows() <= src.frames.rows(); ++t)
    if ((src.frames.row(t) - crop.frames.row(0)).cwiseAbs().maxCoeff() == 0.0)
      return static_cast<int>(t);
  return -1;
}

double power(const std::vector<double>& s) {
  double p = 0.0;
  for (double x : s) p += x * x;
  return p;
}

}  // namespace

TEST_CASE("crop_frames: 4 s and 2 s at the default hop") {
  CHECK(crop_frames(4.0, 0.010) == 398);
  CHECK(crop_frames(2.0, 0.010) == 198);
  CHECK(crop_frames(1.0, 0.010) == 98);  // agrees with num_frames on 1 s
}

TEST_CASE("sample_crops: counts, lengths, and contiguity in the source") {
  Rng feat_rng(1);
  const FeatureMatrix f = test::random_features(450, 6, feat_rng);
  CropConfig cfg;
  Rng rng(2);
  const CropSet cs = sample_crops(f, cfg, rng);
  REQUIRE(cs.long_crops.size() == 2);
  REQUIRE(cs.short_crops.size() == 4);
  for (const auto& c : cs.long_crops) {
    REQUIRE(c.frames.rows() == 398);
    const int s = find_start(f, c);
    REQUIRE(s >= 0);
    CHECK((f.frames.middleRows(s, 398) - c.frames).cwiseAbs().maxCoeff() ==
          0.0);
  }
  for (const auto& c : cs.short_crops) {
    REQUIRE(c.frames.rows() == 198);
    const int s = find_start(f, c);
    REQUIRE(s >= 0);
    CHECK((f.frames.middleRows(s, 198) - c.frames).cwiseAbs().maxCoeff() ==
          0.0);
  }
}

TEST_CASE("sample_crops: source of exactly one long crop is returned whole") {
  Rng feat_rng(3);
  const FeatureMatrix f = test::random_features(398, 4, feat_rng);
  CropConfig cfg;
  Rng rng(4);
  const CropSet cs = sample_crops(f, cfg, rng);
  for (const auto& c : cs.long_crops)
    CHECK((c.frames - f.frames).cwiseAbs().maxCoeff() == 0.0);
  // shorter source must be rejected, callers pad first
  const FeatureMatrix tiny = test::random_features(397, 4, feat_rng);
  CHECK_THROWS_AS(sample_crops(tiny, cfg, rng), InputError);
}

TEST_CASE("sample_crops: start positions are uniform (chi-square)") {
  Rng feat_rng(5);
  const FeatureMatrix f = test::random_features(403, 3, feat_rng);  // 6 starts
  CropConfig cfg;
  cfg.n_short = 0;
  Rng rng(6);
  std::vector<int> counts(6, 0);
  const int n_calls = 1000;
  for (int i = 0; i < n_calls; ++i) {
    const CropSet cs = sample_crops(f, cfg, rng);
    for (const auto& c : cs.long_crops) {
      const int s = find_start(f, c);
      REQUIRE(s >= 0);
      REQUIRE(s < 6);
      ++counts[s];
    }
  }
  const double expected = 2.0 * n_calls / 6.0;
  double chi2 = 0.0;
  for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
  CHECK(chi2 < 15.09);  // chi-square 5 dof, p = 0.01
}

TEST_CASE("add_noise: 0 dB makes the added component match signal power") {
  Rng rng(7);
  Waveform w, n;
  for (int i = 0; i < 4000; ++i) w.samples.push_back(rng.gaussian());
  for (int i = 0; i < 500; ++i) n.samples.push_back(0.01 * rng.gaussian());
  const Waveform out = add_noise(w, n, 0.0, rng);
  std::vector<double> added(w.samples.size());
  for (std::size_t i = 0; i < added.size(); ++i)
    added[i] = out.samples[i] - w.samples[i];
  CHECK(std::abs(power(added) / power(w.samples) - 1.0) < 1e-9);
}

TEST_CASE("add_noise: +inf SNR is a no-op") {
  Rng rng(8);
  Waveform w, n;
  for (int i = 0; i < 100; ++i) {
    w.samples.push_back(rng.gaussian());
    n.samples.push_back(rng.gaussian());
  }
  const Waveform out =
      add_noise(w, n, std::numeric_limits<double>::infinity(), rng);
  for (std::size_t i = 0; i < w.samples.size(); ++i)
    CHECK(out.samples[i] == w.samples[i]);
}

TEST_CASE("add_noise: requested SNR is what you measure afterwards") {
  Rng rng(9);
  Waveform w, n;
  for (int i = 0; i < 3000; ++i) w.samples.push_back(2.0 * rng.gaussian());
  for (int i = 0; i < 3000; ++i) n.samples.push_back(0.3 * rng.gaussian());
  for (double snr : {6.0, 0.0, 12.5, -3.0}) {
    Waveform out = add_noise(w, n, snr, rng);
    std::vector<double> added(w.samples.size());
    for (std::size_t i = 0; i < added.size(); ++i)
      added[i] = out.samples[i] - w.samples[i];
    const double measured =
        10.0 * std::log10(power(w.samples) / power(added));
    CHECK(std::abs(measured - snr) < 0.01);
    if (snr == 6.0) {
      // alpha^2 scaling of a same-power noise: 10^(-0.6) ~ 0.2512
      const double ratio = power(added) / power(w.samples);
      CHECK(ratio == doctest::Approx(std::pow(10.0, -0.6)).epsilon(1e-9));
    }
  }
}

TEST_CASE("reverberate: unit impulse RIR is the identity") {
  Rng rng(10);
  Waveform w, rir;
  for (int i = 0; i < 200; ++i) w.samples.push_back(rng.gaussian());
  rir.samples = {1.0};
  const Waveform out = reverberate(w, rir);
  for (std::size_t i = 0; i < w.samples.size(); ++i)
    CHECK(out.samples[i] == w.samples[i]);
}

TEST_CASE("reverberate: delayed impulse shifts the signal") {
  Waveform w, rir;
  // peak at the front so it survives the shift and the renorm gain is 1
  w.samples = {1.0, 0.5, -0.25, 0.125, 0.0625, -0.03125};
  rir.samples = {0.0, 0.0, 1.0};
  const Waveform out = reverberate(w, rir);
  REQUIRE(out.samples.size() == w.samples.size());
  CHECK(out.samples[0] == 0.0);
  CHECK(out.samples[1] == 0.0);
  for (std::size_t i = 2; i < w.samples.size(); ++i)
    CHECK(out.samples[i] == doctest::Approx(w.samples[i - 2]).epsilon(1e-12));
}

TEST_CASE("reverberate: 64-tap RIR matches a scatter-form convolution") {
  Rng rng(11);
  Waveform w, rir;
  for (int i = 0; i < 700; ++i) w.samples.push_back(rng.gaussian());
  for (int i = 0; i < 64; ++i) rir.samples.push_back(0.3 * rng.gaussian());

  // Oracle: accumulate contributions in scatter order (over input samples),
  // then apply the same peak renormalization.
  std::vector<double> conv(w.samples.size(), 0.0);
  for (std::size_t i = 0; i < w.samples.size(); ++i)
    for (std::size_t j = 0; j < rir.samples.size(); ++j)
      if (i + j < conv.size()) conv[i + j] += w.samples[i] * rir.samples[j];
  double peak_in = 0.0, peak_out = 0.0;
  for (std::size_t i = 0; i < conv.size(); ++i) {
    peak_in = std::max(peak_in, std::abs(w.samples[i]));
    peak_out = std::max(peak_out, std::abs(conv[i]));
  }
  const double g = peak_in / peak_out;

  const Waveform out = reverberate(w, rir);
  for (std::size_t i = 0; i < conv.size(); ++i)
    CHECK(std::abs(out.samples[i] - g * conv[i]) < 1e-10);
}

TEST_CASE("pad_chunk: long-enough input is returned unchanged") {
  Rng rng(12);
  const FeatureMatrix f = test::random_features(10, 3, rng);
  const FeatureMatrix out = pad_chunk(f, 10, PadMode::kZero);
  CHECK((out.frames - f.frames).cwiseAbs().maxCoeff() == 0.0);
  const FeatureMatrix out2 = pad_chunk(f, 4, PadMode::kRepeat);
  CHECK(out2.frames.rows() == 10);
}

TEST_CASE("pad_chunk: repeat mode cycles rows") {
  FeatureMatrix f;
  f.frames.resize(3, 1);
  f.frames << 0.0, 1.0, 2.0;
  const FeatureMatrix out = pad_chunk(f, 8, PadMode::kRepeat);
  REQUIRE(out.frames.rows() == 8);
  const double want[8] = {0, 1, 2, 0, 1, 2, 0, 1};
  for (int t = 0; t < 8; ++t) CHECK(out.frames(t, 0) == want[t]);
}

TEST_CASE("pad_chunk: zero mode appends zero rows") {
  Rng rng(13);
  const FeatureMatrix f = test::random_features(3, 4, rng);
  const FeatureMatrix out = pad_chunk(f, 7, PadMode::kZero);
  REQUIRE(out.frames.rows() == 7);
  CHECK((out.frames.topRows(3) - f.frames).cwiseAbs().maxCoeff() == 0.0);
  CHECK(out.frames.bottomRows(4).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("pad_chunk: every repeat-padded row is a source row") {
  Rng rng(14);
  const FeatureMatrix f = test::random_features(5, 4, rng);
  const FeatureMatrix out = pad_chunk(f, 23, PadMode::kRepeat);
  for (Eigen::Index t = 0; t < out.frames.rows(); ++t) {
    bool found = false;
    for (Eigen::Index s = 0; s < f.frames.rows(); ++s)
      if ((out.frames.row(t) - f.frames.row(s)).cwiseAbs().maxCoeff() == 0.0)
        found = true;
    CHECK(found);
  }
}

TEST_CASE("pad_chunk: empty input repeat-pads only with an error") {
  FeatureMatrix f;
  f.frames.resize(0, 4);
  CHECK_THROWS_AS(pad_chunk(f, 5, PadMode::kRepeat), InputError);
  const FeatureMatrix out = pad_chunk(f, 5, PadMode::kZero);
  CHECK(out.frames.rows() == 5);
  CHECK(out.frames.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("make_noise / make_rir: deterministic in their arguments") {
  const Rng pool(12345);
  for (int kind = 0; kind < 3; ++kind) {
    const Waveform a = make_noise(kind, 2, 1000, 16000, pool);
    const Waveform b = make_noise(kind, 2, 1000, 16000, pool);
    REQUIRE(a.samples.size() == 1000);
    for (std::size_t i = 0; i < 1000; ++i) CHECK(a.samples[i] == b.samples[i]);
    const Waveform c = make_noise(kind, 3, 1000, 16000, pool);
    bool same = true;
    for (std::size_t i = 0; i < 1000; ++i)
      if (a.samples[i] != c.samples[i]) same = false;
    CHECK(!same);
  }
  const Waveform r1 = make_rir(0, 16000, pool), r2 = make_rir(0, 16000, pool);
  REQUIRE(r1.samples.size() == r2.samples.size());
  CHECK(r1.samples[0] == 1.0);  // direct path
  for (std::size_t i = 0; i < r1.samples.size(); ++i)
    CHECK(r1.samples[i] == r2.samples[i]);
}

TEST_CASE("augment_chunk: deterministic under a reseeded rng") {
  Rng src(15);
  Waveform w;
  for (int i = 0; i < 8000; ++i) w.samples.push_back(0.2 * src.gaussian());
  AugmentPolicy policy;
  policy.reverb_prob = 1.0;  // force both transforms on
  policy.noise_prob = 1.0;
  Rng r1(77), r2(77);
  const Waveform a = augment_chunk(w, policy, r1);
  const Waveform b = augment_chunk(w, policy, r2);
  REQUIRE(a.samples.size() == w.samples.size());
  bool changed = false;
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    CHECK(a.samples[i] == b.samples[i]);
    if (a.samples[i] != w.samples[i]) changed = true;
  }
  CHECK(changed);
}

// core/augment.cc

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

#include "sdsv/augment.hh"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sdsv {

int crop_frames(double len_s, double hop_s, double frame_len_s) {
  // Matches num_frames for a chunk of len_s seconds of waveform.
  return static_cast<int>(std::floor((len_s - frame_len_s) / hop_s + 1e-9)) + 1;
}

CropSet sample_crops(const FeatureMatrix& f, const CropConfig& cfg, Rng& rng) {
  SDSV_CHECK(cfg.n_long == 2, "n_long must be 2");
  const int long_frames = crop_frames(cfg.len_long_s, f.frame_hop_s);
  const int short_frames = crop_frames(cfg.len_short_s, f.frame_hop_s);
  const Eigen::Index T = f.frames.rows();
  SDSV_CHECK(T >= long_frames, "needs padding");

  auto slice = [&](int len) {
    const std::uint64_t span = static_cast<std::uint64_t>(T - len) + 1;
    const Eigen::Index start =
        static_cast<Eigen::Index>(rng.uniform_int(span));
    FeatureMatrix crop;
    crop.frame_hop_s = f.frame_hop_s;
    crop.frames = f.frames.middleRows(start, len);
    return crop;
  };

  CropSet out;
  for (int i = 0; i < cfg.n_long; ++i) out.long_crops.push_back(slice(long_frames));
  for (int i = 0; i < cfg.n_short; ++i)
    out.short_crops.push_back(slice(short_frames));
  return out;
}

Waveform add_noise(const Waveform& w, const Waveform& noise, double snr_db,
                   Rng& rng) {
  if (std::isinf(snr_db) && snr_db > 0) return w;
  const std::size_t n = w.samples.size();
  SDSV_CHECK(!noise.samples.empty(), "empty noise");

  // Tile noise if shorter, then pick a random offset into the tiled span.
  std::vector<double> seg(n);
  const std::size_t m = noise.samples.size();
  const std::size_t offset = (m > n) ? rng.uniform_int(m - n + 1) : 0;
  for (std::size_t i = 0; i < n; ++i) seg[i] = noise.samples[(offset + i) % m];

  double p_sig = 0.0, p_noise = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    p_sig += w.samples[i] * w.samples[i];
    p_noise += seg[i] * seg[i];
  }
  SDSV_CHECK(p_sig > 0.0 && p_noise > 0.0, "undefined SNR");

  // alpha^2 * P_noise = P_sig * 10^(-snr/10)
  const double alpha =
      std::sqrt(p_sig / p_noise * std::pow(10.0, -snr_db / 10.0));
  Waveform out = w;
  for (std::size_t i = 0; i < n; ++i) out.samples[i] += alpha * seg[i];
  return out;
}

Waveform reverberate(const Waveform& w, const Waveform& rir) {
  SDSV_CHECK(!rir.samples.empty(), "empty rir");
  for (double h : rir.samples) SDSV_CHECK(std::isfinite(h), "non-finite rir");
  const std::size_t n = w.samples.size();
  const std::size_t k = rir.samples.size();

  Waveform out;
  out.sample_rate = w.sample_rate;
  out.samples.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    const std::size_t jmax = std::min(k - 1, i);
    for (std::size_t j = 0; j <= jmax; ++j)
      acc += rir.samples[j] * w.samples[i - j];
    out.samples[i] = acc;
  }

  double peak_in = 0.0, peak_out = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    peak_in = std::max(peak_in, std::abs(w.samples[i]));
    peak_out = std::max(peak_out, std::abs(out.samples[i]));
  }
  if (peak_out > 0.0 && peak_in > 0.0) {
    const double g = peak_in / peak_out;
    for (double& x : out.samples) x *= g;
  }
  return out;
}

FeatureMatrix pad_chunk(const FeatureMatrix& f, int target, PadMode mode) {
  SDSV_CHECK(target >= 1, "target must be >= 1");
  const Eigen::Index T = f.frames.rows();
  if (T >= target) return f;
  SDSV_CHECK(mode == PadMode::kZero || T > 0, "cannot repeat-pad empty input");

  FeatureMatrix out;
  out.frame_hop_s = f.frame_hop_s;
  out.frames.resize(target, f.frames.cols());
  out.frames.setZero();
  if (T > 0) out.frames.topRows(T) = f.frames;
  if (mode == PadMode::kRepeat)
    for (Eigen::Index t = T; t < target; ++t)
      out.frames.row(t) = f.frames.row(t % T);
  return out;
}

Waveform make_noise(int kind, int index, std::size_t n_samples,
                    int sample_rate, const Rng& pool_seed) {
  Rng rng = pool_seed.derive("noise").derive(kind * 1000003ULL + index);
  Waveform out;
  out.sample_rate = sample_rate;
  out.samples.resize(n_samples);
  switch (kind) {
    case 0: {  // white
      for (auto& x : out.samples) x = 0.1 * rng.gaussian();
      break;
    }
    case 1: {  // pink-ish: one-pole lowpassed white
      double state = 0.0;
      for (auto& x : out.samples) {
        state = 0.95 * state + 0.05 * rng.gaussian();
        x = 2.0 * state;
      }
      break;
    }
    case 2: {  // babble surrogate: amplitude-modulated filtered noise
      const double mod_hz = rng.uniform(2.0, 6.0);
      double state = 0.0;
      for (std::size_t i = 0; i < n_samples; ++i) {
        state = 0.9 * state + 0.1 * rng.gaussian();
        const double env =
            0.6 + 0.4 * std::sin(2.0 * M_PI * mod_hz * i / sample_rate);
        out.samples[i] = 3.0 * env * state;
      }
      break;
    }
    default:
      throw InputError("unknown noise kind");
  }
  return out;
}

Waveform make_rir(int index, int sample_rate, const Rng& pool_seed) {
  Rng rng = pool_seed.derive("rir").derive(static_cast<std::uint64_t>(index));
  // Exponentially decaying random taps; direct path first.
  const int n_taps = 32 + static_cast<int>(rng.uniform_int(33));
  const double decay = rng.uniform(0.05, 0.25);
  Waveform rir;
  rir.sample_rate = sample_rate;
  rir.samples.resize(n_taps);
  rir.samples[0] = 1.0;
  for (int i = 1; i < n_taps; ++i)
    rir.samples[i] = std::exp(-decay * i) * 0.5 * rng.gaussian();
  return rir;
}

Waveform augment_chunk(const Waveform& w, const AugmentPolicy& policy,
                       Rng& rng) {
  Waveform out = w;
  if (rng.uniform() < policy.reverb_prob) {
    const int idx = static_cast<int>(rng.uniform_int(policy.rir_pool));
    out = reverberate(out, make_rir(idx, w.sample_rate, Rng(12345)));
  }
  if (rng.uniform() < policy.noise_prob) {
    const int kind = static_cast<int>(rng.uniform_int(3));
    const int idx = static_cast<int>(rng.uniform_int(policy.noise_pool));
    const auto& r = policy.snr_ranges[kind];
    const double snr = rng.uniform(r.lo_db, r.hi_db);
    Waveform noise =
        make_noise(kind, idx, out.samples.size(), w.sample_rate, Rng(12345));
    out = add_noise(out, noise, snr, rng);
  }
  return out;
}

}  // namespace sdsv

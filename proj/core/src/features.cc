// core/features.cc

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

#include "sdsv/features.hh"

#include <algorithm>
#include <cmath>

#include "sdsv/fft.hh"

namespace sdsv {

namespace {

constexpr double kLogEps = 1e-10;
constexpr double kStdFloor = 1e-8;

int frame_len_samples(int sample_rate, const FeatureConfig& cfg) {
  return static_cast<int>(std::lround(cfg.frame_len_s * sample_rate));
}

int hop_samples(int sample_rate, const FeatureConfig& cfg) {
  return static_cast<int>(std::lround(cfg.hop_s * sample_rate));
}

}  // namespace

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double mel_to_hz(double mel) {
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

int num_frames(std::size_t n_samples, int sample_rate,
               const FeatureConfig& cfg) {
  const int flen = frame_len_samples(sample_rate, cfg);
  const int hop = hop_samples(sample_rate, cfg);
  SDSV_CHECK(flen > hop && hop > 0, "need frame_len_s > hop_s > 0");
  if (n_samples < static_cast<std::size_t>(flen)) return 0;
  return 1 + static_cast<int>((n_samples - flen) / hop);
}

std::vector<double> frame_log_energies(const Waveform& w,
                                       const FeatureConfig& cfg) {
  const int flen = frame_len_samples(w.sample_rate, cfg);
  const int hop = hop_samples(w.sample_rate, cfg);
  const int T = num_frames(w.samples.size(), w.sample_rate, cfg);
  std::vector<double> e(T);
  for (int t = 0; t < T; ++t) {
    double acc = 0.0;
    const double* p = w.samples.data() + static_cast<std::size_t>(t) * hop;
    for (int i = 0; i < flen; ++i) acc += p[i] * p[i];
    e[t] = std::log(acc + kLogEps);
  }
  return e;
}

std::vector<bool> energy_vad(const Waveform& w, const FeatureConfig& cfg) {
  auto loge = frame_log_energies(w, cfg);
  const std::size_t T = loge.size();
  if (T == 0) return {};

  // Noise floor: 10th-percentile frame log energy.
  std::vector<double> sorted = loge;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t idx = (T - 1) / 10;
  const double floor_loge = sorted[idx];
  const double max_loge = sorted[T - 1];

  // Offset is in dB on power; log energies are natural log of power.
  const double offset_nat = cfg.vad_offset_db * std::log(10.0) / 10.0;
  // Digital silence (exactly zero energy, so loge == log(eps)) is never
  // speech.  When the utterance's dynamic range is below the offset, every
  // frame sits at the noise floor; such uniform-energy utterances are
  // treated as fully voiced rather than fully silent.
  const double silence_loge = std::log(kLogEps);
  const bool uniform = (max_loge - floor_loge) < offset_nat;
  std::vector<bool> mask(T);
  for (std::size_t t = 0; t < T; ++t) {
    const bool nonsilent = loge[t] > silence_loge + 1e-12;
    mask[t] = nonsilent && (uniform || loge[t] > floor_loge + offset_nat);
  }
  return mask;
}

Waveform apply_vad(const Waveform& w, const FeatureConfig& cfg) {
  auto mask = energy_vad(w, cfg);
  const int hop = hop_samples(w.sample_rate, cfg);
  Waveform out;
  out.sample_rate = w.sample_rate;
  // Keep each retained frame's hop span; the final frame keeps its full span.
  const int flen = frame_len_samples(w.sample_rate, cfg);
  for (std::size_t t = 0; t < mask.size(); ++t) {
    if (!mask[t]) continue;
    const std::size_t begin = t * hop;
    const std::size_t end = (t + 1 == mask.size())
                                ? std::min(w.samples.size(), begin + flen)
                                : begin + hop;
    out.samples.insert(out.samples.end(), w.samples.begin() + begin,
                       w.samples.begin() + end);
  }
  return out;
}

Matrix mel_filterbank(int n_mels, std::size_t n_fft, int sample_rate) {
  SDSV_CHECK(n_mels >= 1, "n_mels must be >= 1");
  const std::size_t n_bins = n_fft / 2 + 1;
  const double nyquist = sample_rate / 2.0;
  const double mel_max = hz_to_mel(nyquist);

  // n_mels + 2 equally spaced mel points from 0 to Nyquist.
  std::vector<double> hz(n_mels + 2);
  for (int i = 0; i < n_mels + 2; ++i)
    hz[i] = mel_to_hz(mel_max * i / (n_mels + 1));

  Matrix fb = Matrix::Zero(n_mels, static_cast<Eigen::Index>(n_bins));
  for (int m = 0; m < n_mels; ++m) {
    const double lo = hz[m], mid = hz[m + 1], hi = hz[m + 2];
    for (std::size_t k = 0; k < n_bins; ++k) {
      const double f = static_cast<double>(k) * sample_rate /
                       static_cast<double>(n_fft);
      double wgt = 0.0;
      if (f > lo && f < hi)
        wgt = (f <= mid) ? (f - lo) / (mid - lo) : (hi - f) / (hi - mid);
      fb(m, static_cast<Eigen::Index>(k)) = wgt;
    }
  }
  return fb;
}

FeatureMatrix logmel(const Waveform& w, const FeatureConfig& cfg) {
  const int flen = frame_len_samples(w.sample_rate, cfg);
  const int hop = hop_samples(w.sample_rate, cfg);
  const int T = num_frames(w.samples.size(), w.sample_rate, cfg);
  SDSV_CHECK(T >= 1, "too short");

  const std::size_t n_fft = next_pow2(static_cast<std::size_t>(flen));
  const Matrix fb = mel_filterbank(cfg.n_mels, n_fft, w.sample_rate);
  const std::size_t n_bins = n_fft / 2 + 1;

  std::vector<double> hamming(flen);
  for (int i = 0; i < flen; ++i)
    hamming[i] = 0.54 - 0.46 * std::cos(2.0 * M_PI * i / (flen - 1));

  FeatureMatrix out;
  out.frame_hop_s = cfg.hop_s;
  out.frames.resize(T, cfg.n_mels);
  std::vector<double> frame(flen);
  Vector pow_vec(static_cast<Eigen::Index>(n_bins));
  for (int t = 0; t < T; ++t) {
    const double* p = w.samples.data() + static_cast<std::size_t>(t) * hop;
    for (int i = 0; i < flen; ++i) frame[i] = p[i] * hamming[i];
    auto pow = power_spectrum(frame, n_fft);
    for (std::size_t k = 0; k < n_bins; ++k)
      pow_vec(static_cast<Eigen::Index>(k)) = pow[k];
    Vector mel = fb * pow_vec;
    for (int m = 0; m < cfg.n_mels; ++m)
      out.frames(t, m) = std::log(mel(m) + kLogEps);
  }
  return out;
}

FeatureMatrix sliding_mvn(const FeatureMatrix& f, int window) {
  SDSV_CHECK(window >= 3, "mvn window must be >= 3");
  const Eigen::Index T = f.frames.rows();
  const Eigen::Index D = f.frames.cols();
  const int half = window / 2;

  FeatureMatrix out;
  out.frame_hop_s = f.frame_hop_s;
  out.frames.resize(T, D);
  for (Eigen::Index t = 0; t < T; ++t) {
    const Eigen::Index lo = std::max<Eigen::Index>(0, t - half);
    const Eigen::Index hi = std::min<Eigen::Index>(T - 1, t + half);
    const Eigen::Index n = hi - lo + 1;
    const auto block = f.frames.middleRows(lo, n);
    Eigen::RowVectorXd mean = block.colwise().mean();
    Eigen::RowVectorXd var =
        (block.rowwise() - mean).array().square().colwise().sum() /
        static_cast<double>(n);
    for (Eigen::Index d = 0; d < D; ++d) {
      const double sd = std::max(std::sqrt(var(d)), kStdFloor);
      out.frames(t, d) = (f.frames(t, d) - mean(d)) / sd;
    }
  }
  return out;
}

}  // namespace sdsv

// core/features.hh

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

#ifndef SDSV_FEATURES_HH_
#define SDSV_FEATURES_HH_

#include <vector>

#include "sdsv/common.hh"

namespace sdsv {

struct FeatureConfig {
  int n_mels = 24;
  double frame_len_s = 0.025;
  double hop_s = 0.010;
  int mvn_window = 150;
  double vad_offset_db = 6.0;  // margin above the per-utterance energy floor
};

// Number of frames for n samples: 1 + floor((n - frame_len) / hop).
// Returns 0 when n < frame_len.
int num_frames(std::size_t n_samples, int sample_rate,
               const FeatureConfig& cfg);

// Per-frame log energies (natural log of sum of squares + 1e-10), computed
// on the raw (unwindowed) frame.
std::vector<double> frame_log_energies(const Waveform& w,
                                       const FeatureConfig& cfg);

// Energy VAD: keep a frame iff its log energy exceeds the utterance's
// noise floor (10th-percentile frame log energy) by vad_offset_db.
// Empty waveform gives an empty mask.
std::vector<bool> energy_vad(const Waveform& w, const FeatureConfig& cfg);

// Drop the samples of frames rejected by energy_vad (samples not covered by
// any kept frame's span are removed).
Waveform apply_vad(const Waveform& w, const FeatureConfig& cfg);

// Log mel filter bank features.  Hamming window, magnitude-squared DFT,
// triangular mel filters with unit peak covering 0..Nyquist.
FeatureMatrix logmel(const Waveform& w, const FeatureConfig& cfg);

// Sliding-window mean/variance normalization; the window (>= 3 frames) is
// centered on each frame and truncated at the edges; std floor 1e-8.
FeatureMatrix sliding_mvn(const FeatureMatrix& f, int window);

// Triangular mel filterbank weights, n_mels x (n_fft/2 + 1).
Matrix mel_filterbank(int n_mels, std::size_t n_fft, int sample_rate);

// mel(f) = 2595 * log10(1 + f / 700)
double hz_to_mel(double hz);
double mel_to_hz(double mel);

}  // namespace sdsv

#endif  // SDSV_FEATURES_HH_

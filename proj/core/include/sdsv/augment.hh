// core/augment.hh

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

#ifndef SDSV_AUGMENT_HH_
#define SDSV_AUGMENT_HH_

#include <array>
#include <string>
#include <vector>

#include "sdsv/common.hh"
#include "sdsv/rng.hh"

namespace sdsv {

struct CropConfig {
  int n_long = 2;       // fixed at 2: both long views feed the teacher
  double len_long_s = 4.0;
  int n_short = 4;
  double len_short_s = 2.0;
};

enum class PadMode { kZero, kRepeat };

struct SnrRange {
  double lo_db;
  double hi_db;
};

struct AugmentPolicy {
  double reverb_prob = 0.45;
  double noise_prob = 0.7;
  // Synthetic noise pool: white, pink-ish filtered, amplitude-modulated
  // babble surrogate; one SNR range per type.
  std::array<SnrRange, 3> snr_ranges = {{{3.0, 18.0}, {3.0, 18.0}, {0.0, 18.0}}};
  int rir_pool = 8;    // number of synthetic impulse responses
  int noise_pool = 8;  // number of noise realizations per type
};

struct CropSet {
  std::vector<FeatureMatrix> long_crops;   // exactly 2
  std::vector<FeatureMatrix> short_crops;  // n_short
  std::string source_utt;
};

// Contiguous frame slices at independently uniform random starts.
// f must be at least one long crop; callers pad first otherwise.
CropSet sample_crops(const FeatureMatrix& f, const CropConfig& cfg, Rng& rng);

// Frame counts implied by crop lengths at a given hop and frame length.
int crop_frames(double len_s, double hop_s, double frame_len_s = 0.025);

// Mix noise into w at the requested SNR (powers measured over the added
// span).  Noise is tiled if shorter than w.  snr_db = +inf is a no-op.
Waveform add_noise(const Waveform& w, const Waveform& noise, double snr_db,
                   Rng& rng);

// Full convolution truncated to len(w), renormalized to the input's peak.
Waveform reverberate(const Waveform& w, const Waveform& rir);

// Pad f to target frames, or return it unchanged when already long enough.
FeatureMatrix pad_chunk(const FeatureMatrix& f, int target, PadMode mode);

// Synthetic augmentation sources.  Deterministic in (kind/index, length).
Waveform make_noise(int kind, int index, std::size_t n_samples,
                    int sample_rate, const Rng& pool_seed);
Waveform make_rir(int index, int sample_rate, const Rng& pool_seed);

// One random reverb/noise draw per chunk, applied per the policy.
Waveform augment_chunk(const Waveform& w, const AugmentPolicy& policy,
                       Rng& rng);

}  // namespace sdsv

#endif  // SDSV_AUGMENT_HH_

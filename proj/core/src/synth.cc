// core/synth.cc

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

#include "sdsv/synth.hh"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>

#include "sdsv/rng.hh"

namespace sdsv {

namespace {

struct Resonator {
  double freq_hz;
  double bandwidth_hz;
};

struct SpeakerVoice {
  double f0_hz;
  std::array<Resonator, 3> formants;
  double breathiness;  // noise fraction in the excitation
  // Articulation dynamics.  Static spectra are wiped out by sliding MVN, so
  // speaker identity must also live in how the spectrum moves: formant
  // vibrato (FM) and a slow energy trade between the formant branches give
  // speaker-specific cross-band structure that normalization cannot remove.
  double vib_hz;       // formant vibrato rate
  double vib_depth;    // relative formant-frequency excursion
  double mix_hz;       // articulation rate of the branch-energy trade
  double mix_depth;    // excursion of the branch weights around 1
  std::array<double, 3> mix_offset;  // per-branch phase offsets of the trade
};

SpeakerVoice make_voice(Rng rng) {
  SpeakerVoice v;
  v.f0_hz = rng.uniform(80.0, 300.0);
  // Formant-like resonances spread across the band.
  v.formants[0] = {rng.uniform(300.0, 900.0), rng.uniform(60.0, 120.0)};
  v.formants[1] = {rng.uniform(1000.0, 2200.0), rng.uniform(80.0, 160.0)};
  v.formants[2] = {rng.uniform(2400.0, 3800.0), rng.uniform(100.0, 200.0)};
  v.breathiness = rng.uniform(0.05, 0.25);
  v.vib_hz = rng.uniform(3.0, 8.0);
  v.vib_depth = rng.uniform(0.08, 0.2);
  v.mix_hz = rng.uniform(1.2, 3.0);
  v.mix_depth = rng.uniform(0.5, 0.9);
  // The relative phases decide which bands trade energy with which; they
  // are part of the voice, only the global phase varies per utterance.
  for (auto& o : v.mix_offset) o = rng.uniform(0.0, 2.0 * M_PI);
  return v;
}

// Second-order resonator with a slowly wandering center frequency:
// y[n] = 2 r cos(theta[n]) y[n-1] - r^2 y[n-2] + x[n]
std::vector<double> resonate_fm(const std::vector<double>& x,
                                const Resonator& res, int fs, double vib_hz,
                                double vib_depth, double vib_phase) {
  const double r = std::exp(-M_PI * res.bandwidth_hz / fs);
  const double a2 = -r * r;
  const double w_vib = 2.0 * M_PI * vib_hz / fs;
  std::vector<double> out(x.size());
  double y1 = 0.0, y2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f =
        res.freq_hz *
        (1.0 + vib_depth * std::sin(w_vib * static_cast<double>(i) +
                                    vib_phase));
    const double a1 = 2.0 * r * std::cos(2.0 * M_PI * f / fs);
    const double y = a1 * y1 + a2 * y2 + x[i];
    y2 = y1;
    y1 = y;
    out[i] = y;
  }
  return out;
}

// Attribute classes are energy-contour families independent of the voice:
// class c cycles through {flat, rising, falling, tremolo-like} shapes.
double attr_envelope(int attr_class, double t, double dur, double mod_hz) {
  // Kept mild so the attribute stays a secondary cue: the sliding-MVN
  // front end largely removes energy contours, and the residual must not
  // drown the speaker dynamics during self-supervised training.
  switch (attr_class % 4) {
    case 0: return 1.0;
    case 1: return 0.7 + 0.6 * (t / dur);
    case 2: return 1.3 - 0.6 * (t / dur);
    default: return 1.0 + 0.3 * std::sin(2.0 * M_PI * mod_hz * t);
  }
}

}  // namespace

std::vector<CorpusUtterance> synth_corpus(const SyntheticCorpusSpec& spec) {
  SDSV_CHECK(spec.n_speakers >= 1 && spec.utts_per_speaker >= 1 &&
                 spec.n_attr_classes >= 1,
             "all corpus counts must be >= 1");
  SDSV_CHECK(spec.dur_lo_s > 0 && spec.dur_hi_s >= spec.dur_lo_s,
             "bad duration range");

  const Rng master(spec.seed);
  const int fs = spec.sample_rate;
  std::vector<CorpusUtterance> corpus;
  corpus.reserve(static_cast<std::size_t>(spec.n_speakers) *
                 spec.utts_per_speaker);

  for (int spk = 0; spk < spec.n_speakers; ++spk) {
    const SpeakerVoice voice =
        make_voice(master.derive("speaker").derive(spk));
    for (int u = 0; u < spec.utts_per_speaker; ++u) {
      Rng rng = master.derive("utt").derive(spk * 100003ULL + u);
      const double dur = rng.uniform(spec.dur_lo_s, spec.dur_hi_s);
      const std::size_t n = static_cast<std::size_t>(std::lround(dur * fs));
      const int attr =
          static_cast<int>((spk * spec.utts_per_speaker + u) %
                           spec.n_attr_classes);
      const double mod_hz = 3.0 + 0.25 * attr;

      // Pulse train at a slightly jittered pitch plus breath noise.
      const double f0 = voice.f0_hz * rng.uniform(0.95, 1.05);
      std::vector<double> x(n, 0.0);
      double phase = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        phase += f0 / fs;
        if (phase >= 1.0) {
          phase -= 1.0;
          x[i] = 1.0;
        }
        x[i] += voice.breathiness * rng.gaussian();
      }

      // Parallel formant branches mixed with weights that trade energy
      // between the bands at the speaker's articulation rate.  Phases are
      // per-utterance so the cue is the motion statistics, not a waveform.
      const double vib_rate = voice.vib_hz * rng.uniform(0.95, 1.05);
      const double mix_rate = voice.mix_hz * rng.uniform(0.9, 1.1);
      std::array<double, 3> vib_phase, mix_phase;
      const double utt_phase = rng.uniform(0.0, 2.0 * M_PI);
      for (int k = 0; k < 3; ++k) {
        vib_phase[k] = rng.uniform(0.0, 2.0 * M_PI);
        mix_phase[k] = utt_phase + voice.mix_offset[k];
      }
      std::array<std::vector<double>, 3> branch;
      for (int k = 0; k < 3; ++k) {
        branch[k] = resonate_fm(x, voice.formants[k], fs, vib_rate,
                                voice.vib_depth, vib_phase[k]);
        // Equalize branch power so the weight trade moves spectral balance,
        // not overall level (resonator gains differ wildly with bandwidth).
        double p = 0.0;
        for (double s : branch[k]) p += s * s;
        const double rms = std::sqrt(p / static_cast<double>(n));
        if (rms > 0.0)
          for (double& s : branch[k]) s /= rms;
      }
      const double w_mix = 2.0 * M_PI * mix_rate / fs;
      for (std::size_t i = 0; i < n; ++i) {
        // Zero-mean weight excursions: bands trade energy without a net
        // amplitude modulation (keeps the VAD profile of the utterance).
        std::array<double, 3> w;
        double m = 0.0;
        for (int k = 0; k < 3; ++k) {
          w[k] = voice.mix_depth *
                 std::sin(w_mix * static_cast<double>(i) + mix_phase[k]);
          m += w[k] / 3.0;
        }
        double s = 0.0;
        for (int k = 0; k < 3; ++k) s += (1.0 + w[k] - m) * branch[k][i];
        x[i] = s;
      }

      double peak = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / fs;
        x[i] *= attr_envelope(attr, t, dur, mod_hz);
        peak = std::max(peak, std::abs(x[i]));
      }
      const double gain = (peak > 0.0) ? 0.5 / peak : 1.0;

      CorpusUtterance utt;
      char buf[64];
      std::snprintf(buf, sizeof(buf), "spk%04d", spk);
      utt.speaker_id = buf;
      std::snprintf(buf, sizeof(buf), "spk%04d_utt%04d", spk, u);
      utt.utt_id = buf;
      utt.attr_class = attr;
      utt.wave.sample_rate = fs;
      utt.wave.samples.resize(n);
      for (std::size_t i = 0; i < n; ++i) utt.wave.samples[i] = gain * x[i];
      corpus.push_back(std::move(utt));
    }
  }
  return corpus;
}

}  // namespace sdsv

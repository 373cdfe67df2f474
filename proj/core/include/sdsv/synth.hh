// core/synth.hh

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

#ifndef SDSV_SYNTH_HH_
#define SDSV_SYNTH_HH_

#include <cstdint>
#include <string>
#include <vector>

#include "sdsv/common.hh"

namespace sdsv {

struct SyntheticCorpusSpec {
  int n_speakers = 20;
  int utts_per_speaker = 10;
  double dur_lo_s = 4.5;
  double dur_hi_s = 6.0;
  int n_attr_classes = 4;
  std::uint64_t seed = 0;
  int sample_rate = 16000;
};

struct CorpusUtterance {
  std::string utt_id;
  std::string speaker_id;
  int attr_class = 0;
  Waveform wave;
};

// Deterministic synthetic-speaker corpus.  Each speaker is a fixed random
// formant-like resonator cascade plus a base pitch applied to a pulse+noise
// excitation; the attribute class modulates the utterance energy contour
// independently of the speaker.
std::vector<CorpusUtterance> synth_corpus(const SyntheticCorpusSpec& spec);

}  // namespace sdsv

#endif  // SDSV_SYNTH_HH_

// core/config.hh

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

#ifndef SDSV_CONFIG_HH_
#define SDSV_CONFIG_HH_

#include <cstdint>
#include <string>

#include "sdsv/cluster.hh"
#include "sdsv/common.hh"
#include "sdsv/dino.hh"
#include "sdsv/supervised.hh"
#include "sdsv/synth.hh"

namespace sdsv {

enum class BackendKind { kCosine, kPLDA };

struct BackendConfig {
  BackendKind kind = BackendKind::kCosine;
  int plda_dim = 16;    // eigen-voice rank q
  int plda_iters = 20;  // EM iterations
};

struct EvalConfig {
  double p_target = 0.01;
  double c_miss = 1.0;
  double c_fa = 1.0;
};

// Everything a run needs, from flat INI-like sections.  Unknown sections or
// keys are rejected.  A fully resolved copy is written next to every run's
// outputs so artifact directories are self-describing.
struct RunConfig {
  std::uint64_t seed = 0;
  std::string out_dir;

  SyntheticCorpusSpec synth;
  FeatureConfig features;
  CropConfig crop;
  AugmentPolicy augment;
  EncoderConfig encoder;
  HeadConfig head;
  AdamConfig adam;
  DinoConfig dino;
  SupervisedConfig supervised;
  FinetuneConfig finetune;
  BackendConfig backend;
  IterateConfig cluster;
  EvalConfig eval;

  // Copies the shared sections (features/crop/augment/encoder/head/adam)
  // into the nested trainer configs.
  void resolve();
};

// Parse from file / text.  Throws InputError naming the offending
// [section] key on unknown keys or malformed values.
RunConfig load_run_config(const std::string& path);
RunConfig parse_run_config(const std::string& text,
                           const std::string& origin = "<string>");

// Fully resolved INI serialization (every key explicit, doubles at 17
// significant digits); parse(serialize(c)) == c.
std::string serialize_run_config(const RunConfig& cfg);
void write_run_config(const std::string& path, const RunConfig& cfg);

// FNV-1a hash of the resolved serialization; stamped into checkpoints.
std::uint64_t config_hash(const RunConfig& cfg);

}  // namespace sdsv

#endif  // SDSV_CONFIG_HH_

// core/dino.hh

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

#ifndef SDSV_DINO_HH_
#define SDSV_DINO_HH_

#include <cstdint>
#include <string>
#include <vector>

#include "sdsv/augment.hh"
#include "sdsv/common.hh"
#include "sdsv/features.hh"
#include "sdsv/nn.hh"
#include "sdsv/synth.hh"

namespace sdsv {

enum class ScheduleKind { kCosine, kLinearWarmupCosine };

// Piecewise schedule: optional linear ramp 0 -> start over warmup_steps,
// then cosine start -> end over the remaining span.
// Pure cosine: end + (start - end) * (1 + cos(pi * t)) / 2.
double schedule_value(ScheduleKind kind, long long step, long long total,
                      double start, double end, long long warmup_steps = 0);

// Softmax with temperature, max-subtracted for stability.
Vector temp_softmax(const Vector& logits, double tau);

struct DinoConfig {
  double tau_s = 0.1;
  double tau_t = 0.04;
  double center_momentum = 0.9;
  double teacher_momentum_start = 0.996;  // cosine-scheduled to _end
  double teacher_momentum_end = 1.0;
  int epochs = 30;
  int batch_size = 16;
  double lr = 0.0025;
  double lr_min = 1e-6;
  int warmup_epochs = 3;
  int freeze_last_epochs = 1;
  bool centering = true;   // ablation switch for the collapse study
  bool augment = true;
  CropConfig crop;
  AugmentPolicy policy;
  FeatureConfig features;
  EncoderConfig encoder;
  HeadConfig head;
  AdamConfig adam;
};

struct DinoState {
  EncoderParams student_enc;
  HeadParams student_head;
  EncoderParams teacher_enc;
  HeadParams teacher_head;
  Vector center;  // running center c over teacher logits
  AdamState adam;
  long long step = 0;
  int epoch = 0;

  std::vector<ParamRef> student_refs();
  std::vector<ParamRef> teacher_refs();
};

struct DinoEpochStats {
  int epoch = 0;
  double loss = 0.0;
  double teacher_entropy = 0.0;  // mean over teacher outputs, nats
  double teacher_max_prob = 0.0;
  double center_norm = 0.0;
  double lambda = 0.0;
  double lr = 0.0;
};

struct DinoResult {
  DinoState state;
  std::vector<DinoEpochStats> history;
};

// Multi-crop distillation loss over the pair set {teacher long view x} x
// {student view x' in S, x' != x}, normalized by the pair count.
// teacher_probs are the (already centered, sharpened) teacher distributions
// for the two long views; student_logits hold the long views first.
// Gradients w.r.t. each student logit vector are written to grad_logits.
double dino_loss(const std::vector<Vector>& teacher_probs,
                 const std::vector<Vector>& student_logits, double tau_s,
                 std::vector<Vector>* grad_logits);

// Teacher distribution for one view: temp_softmax(logits - c, tau_t).
Vector teacher_distribution(const Vector& logits, const Vector& center,
                            double tau_t);

// theta_t <- lambda * theta_t + (1 - lambda) * theta_s, elementwise.
void ema_update(std::vector<ParamRef>& teacher,
                const std::vector<ParamRef>& student, double lambda);

// c <- m * c + (1 - m) * mean of the pre-centering teacher logits.
void center_update(Vector& center, const std::vector<Vector>& teacher_logits,
                   double momentum);

// Full training loop.  Utterances shorter than one long crop after VAD are
// dropped.  Deterministic in seed.
DinoResult train_dino(const std::vector<CorpusUtterance>& corpus,
                      const DinoConfig& cfg, std::uint64_t seed);

}  // namespace sdsv

#endif  // SDSV_DINO_HH_

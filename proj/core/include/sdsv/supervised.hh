// core/supervised.hh

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

#ifndef SDSV_SUPERVISED_HH_
#define SDSV_SUPERVISED_HH_

#include <cstdint>
#include <string>
#include <vector>

#include "sdsv/augment.hh"
#include "sdsv/common.hh"
#include "sdsv/features.hh"
#include "sdsv/nn.hh"
#include "sdsv/synth.hh"

namespace sdsv {

struct AAMConfig {
  double scale = 30.0;
  double margin = 0.3;
  int margin_warmup_epochs = 20;
};

// Margin warmed up linearly from 0 over the first margin_warmup_epochs.
double margin_at(int epoch, const AAMConfig& cfg);

// Additive angular margin softmax.  Embeddings and class rows are
// l2-normalized internally; the true-class logit is s*cos(theta + m) with
// the standard monotonic extension cos(theta) - m*sin(m) once theta + m
// would pass pi.  Returns the mean cross-entropy over the batch; exact
// analytic gradients are written to grad_embeddings / grad_weights.
double aam_loss(const Matrix& embeddings, const std::vector<int>& labels,
                const Matrix& weights, double scale, double margin,
                Matrix* grad_embeddings, Matrix* grad_weights);

// Plain softmax cross-entropy on affine logits W e + b (mean over batch).
double ce_loss(const Matrix& embeddings, const std::vector<int>& labels,
               const Matrix& weights, const Vector& bias,
               Matrix* grad_embeddings, Matrix* grad_weights,
               Vector* grad_bias);

enum class LossKind { kCrossEntropy, kAAM };
enum class FinetuneStrategy { kFT1, kFT2 };

struct SupervisedConfig {
  int epochs = 30;
  int batch_size = 16;
  double lr = 0.005;
  double chunk_len_s = 4.0;
  PadMode pad_mode = PadMode::kRepeat;
  bool augment = true;
  LossKind loss = LossKind::kAAM;
  AAMConfig aam;
  AdamConfig adam;
  FeatureConfig features;
  AugmentPolicy policy;
  EncoderConfig encoder;
};

struct SupervisedModel {
  EncoderParams encoder;
  Matrix w_cls;  // n_classes x embedding_dim (AAM: used via row directions)
  Vector b_cls;  // cross-entropy head only; zero for AAM

  std::vector<ParamRef> param_refs();
};

struct SupervisedEpochStats {
  int epoch = 0;
  double loss = 0.0;
  double accuracy = 0.0;  // training accuracy on the sampled chunks
  double margin = 0.0;
  double lr = 0.0;
};

struct SupervisedResult {
  SupervisedModel model;
  std::vector<SupervisedEpochStats> history;
};

// Minibatch training on (corpus, integer labels).  Deterministic in seed.
// When init is given, training continues from it instead of a fresh
// initialization; freeze_pre_pooling freezes the encoder's pre-pooling
// stack (only the embedding affine and classifier move), as used by the
// robust pseudo-labeling stage.
SupervisedResult train_supervised(const std::vector<CorpusUtterance>& corpus,
                                  const std::vector<int>& labels,
                                  int n_classes, const SupervisedConfig& cfg,
                                  std::uint64_t seed,
                                  const SupervisedModel* init = nullptr,
                                  bool freeze_pre_pooling = false);

struct FinetuneConfig {
  FinetuneStrategy strategy = FinetuneStrategy::kFT2;
  LossKind loss = LossKind::kCrossEntropy;
  double chunk_len_s = 2.0;
  PadMode pad_mode = PadMode::kRepeat;
  bool augment = false;
  int epochs = 50;
  int batch_size = 16;
  double lr = 1e-4;
  int plateau_patience = 10;      // epochs without improvement
  double plateau_factor = 0.1;    // lr multiplier on plateau
  double plateau_min_delta = 1e-5;
  double valid_fraction = 0.2;    // held-out split for plateau detection
  AAMConfig aam;
  AdamConfig adam;
  FeatureConfig features;
  AugmentPolicy policy;
};

struct FinetuneResult {
  SupervisedModel model;
  std::vector<SupervisedEpochStats> history;  // phases concatenated
  // FT2 only: model state at the end of the frozen phase, so callers (and
  // tests) can verify the frozen blocks never moved.
  SupervisedModel after_phase1;
};

// Transfer learning from a pretrained encoder with a fresh output layer.
// FT1 tunes everything at once.  FT2 first tunes only the encoder's final
// embedding affine plus the new output layer (everything else structurally
// frozen), then tunes the whole network; the lr/plateau policy runs fully
// in each phase.
FinetuneResult finetune(const EncoderParams& pretrained,
                        const std::vector<CorpusUtterance>& corpus,
                        const std::vector<int>& labels, int n_classes,
                        const FinetuneConfig& cfg, std::uint64_t seed);

// Class prediction for one utterance (argmax over the classifier logits;
// AAM heads score by cosine, i.e. margin-free).
int predict_class(const SupervisedModel& model, const Waveform& w,
                  const FeatureConfig& features, LossKind loss);

// Utterance embedding: VAD -> log-mel -> sliding MVN -> encoder.
Vector utterance_embedding(const EncoderParams& enc, const Waveform& w,
                           const FeatureConfig& features);

}  // namespace sdsv

#endif  // SDSV_SUPERVISED_HH_

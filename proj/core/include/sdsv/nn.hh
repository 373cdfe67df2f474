// core/nn.hh

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

#ifndef SDSV_NN_HH_
#define SDSV_NN_HH_

#include <functional>
#include <string>
#include <vector>

#include "sdsv/common.hh"
#include "sdsv/rng.hh"

namespace sdsv {

// A named view onto one parameter block's storage.  All optimizer, EMA,
// freezing, and checkpoint code works on flat lists of these, in a fixed
// order, so parameter layout is defined in exactly one place per model.
struct ParamRef {
  std::string name;
  double* data;
  Eigen::Index rows;
  Eigen::Index cols;

  Eigen::Index size() const { return rows * cols; }
  Eigen::Map<Matrix> mat() const {
    return Eigen::Map<Matrix>(data, rows, cols);
  }
};

Eigen::Index total_size(const std::vector<ParamRef>& refs);
Vector flatten(const std::vector<ParamRef>& refs);
void unflatten(const Vector& flat, std::vector<ParamRef>& refs);

// ---------------------------------------------------------------------------
// Encoder: per-frame affine + ReLU stack, mean + std pooling over time,
// final embedding affine.

struct EncoderConfig {
  int input_dim = 24;
  std::vector<int> hidden_dims = {64};
  int embedding_dim = 32;
};

struct EncoderParams {
  EncoderConfig cfg;
  std::vector<Matrix> w;  // w[i]: hidden_dims[i] x prev_dim
  std::vector<Vector> b;
  Matrix w_emb;           // embedding_dim x 2*hidden_dims.back()
  Vector b_emb;

  static EncoderParams init(const EncoderConfig& cfg, Rng& rng);
  EncoderParams zeros_like() const;
  std::vector<ParamRef> param_refs();
};

struct EncoderCache {
  Matrix input;                 // T x D
  std::vector<Matrix> hidden;   // post-ReLU activations, T x h
  Vector mean, stddev;          // pooled statistics
  Vector pooled;                // [mean; std]
};

// Returns the utterance embedding; cache holds all intermediates needed by
// encoder_backward.  Population variance with a 1e-8 floor before sqrt.
Vector encoder_forward(const EncoderParams& p, const FeatureMatrix& f,
                       EncoderCache* cache);

// Accumulates exact parameter gradients into grads (same shapes as params).
void encoder_backward(const EncoderParams& p, const EncoderCache& cache,
                      const Vector& grad_embedding, EncoderParams& grads);

// ---------------------------------------------------------------------------
// Projection head: hidden affine+ReLU layers, linear bottleneck affine,
// l2 normalization, weight-normalized final affine (per-row gain frozen
// at 1, so rows of v_dir act through their directions only).

struct HeadConfig {
  int input_dim = 32;
  std::vector<int> hidden_dims = {64, 64};
  int bottleneck_dim = 32;
  int out_dim = 256;  // K
};

struct HeadParams {
  HeadConfig cfg;
  std::vector<Matrix> w;  // hidden affines (ReLU after each)
  std::vector<Vector> b;
  Matrix w_bot;           // bottleneck_dim x hidden_dims.back(), linear
  Vector b_bot;
  Matrix v_dir;           // out_dim x bottleneck_dim

  static HeadParams init(const HeadConfig& cfg, Rng& rng);
  HeadParams zeros_like() const;
  std::vector<ParamRef> param_refs();

  // Rescale v_dir rows to unit norm (applied after every optimizer step).
  void renormalize_rows();
};

struct HeadCache {
  Vector input;
  std::vector<Vector> hidden;
  Vector bottleneck;       // pre-normalization
  double bottleneck_norm;  // floored at 1e-12
  Vector unit_bottleneck;
  Vector row_norms;        // ||v_k|| per output row
};

Vector head_forward(const HeadParams& p, const Vector& embedding,
                    HeadCache* cache);

// Returns the gradient w.r.t. the input embedding; parameter gradients are
// accumulated into grads.
Vector head_backward(const HeadParams& p, const HeadCache& cache,
                     const Vector& grad_logits, HeadParams& grads);

// ---------------------------------------------------------------------------
// Adam (decoupled weight decay, optional amsgrad).

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.95;
  double eps = 1e-8;
  double weight_decay = 1e-5;
  bool amsgrad = true;
};

struct AdamState {
  Vector m;      // first moments
  Vector v;      // second moments
  Vector v_max;  // amsgrad running max of bias-corrected second moments
  long long step = 0;

  static AdamState init(Eigen::Index n);
};

// One update step at learning rate lr.  Throws DivergedError on non-finite
// gradients.  frozen, when non-null, marks per-block gradients to zero out
// (same length as params).
void adam_step(std::vector<ParamRef>& params,
               const std::vector<ParamRef>& grads, AdamState& st,
               const AdamConfig& cfg, double lr,
               const std::vector<bool>* frozen = nullptr);

// ---------------------------------------------------------------------------
// Finite-difference gradient checker.  loss() must evaluate the loss at the
// current parameter values; analytic is the flattened analytic gradient in
// param_refs order.  Returns the max relative error
// |a - n| / max(1e-8, |a| + |n|) over all parameters.
double grad_check(std::vector<ParamRef>& params,
                  const std::function<double()>& loss, const Vector& analytic,
                  double h = 1e-5);

}  // namespace sdsv

#endif  // SDSV_NN_HH_

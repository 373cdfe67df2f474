// core/supervised.cc

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

#include "sdsv/supervised.hh"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sdsv {

namespace {
constexpr double kNormFloor = 1e-12;
}

double margin_at(int epoch, const AAMConfig& cfg) {
  if (cfg.margin_warmup_epochs <= 0 || epoch >= cfg.margin_warmup_epochs)
    return cfg.margin;
  return cfg.margin * static_cast<double>(epoch) /
         static_cast<double>(cfg.margin_warmup_epochs);
}

double aam_loss(const Matrix& embeddings, const std::vector<int>& labels,
                const Matrix& weights, double scale, double margin,
                Matrix* grad_embeddings, Matrix* grad_weights) {
  const Eigen::Index n = embeddings.rows();
  const Eigen::Index C = weights.rows();
  SDSV_CHECK(static_cast<Eigen::Index>(labels.size()) == n,
             "label count mismatch");
  SDSV_CHECK(embeddings.cols() == weights.cols(), "embedding dim mismatch");
  for (int y : labels)
    SDSV_CHECK(y >= 0 && y < C, "label out of range");

  // Row-normalized class directions.
  Vector w_norms(C);
  Matrix w_hat(C, weights.cols());
  for (Eigen::Index k = 0; k < C; ++k) {
    w_norms(k) = std::max(weights.row(k).norm(), kNormFloor);
    w_hat.row(k) = weights.row(k) / w_norms(k);
  }

  const double cos_m = std::cos(margin);
  const double sin_m = std::sin(margin);
  const double easing_threshold = std::cos(M_PI - margin);

  if (grad_embeddings) grad_embeddings->setZero(n, embeddings.cols());
  Matrix g_w_hat = Matrix::Zero(C, weights.cols());

  double loss = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const int y = labels[j];
    const double e_norm = std::max(embeddings.row(j).norm(), kNormFloor);
    const Vector e_hat = embeddings.row(j).transpose() / e_norm;
    Vector cosines = w_hat * e_hat;

    // Margin on the true class, with the monotonic extension past pi.
    const double c_y = cosines(y);
    double phi, dphi;
    if (c_y > easing_threshold) {
      const double sin_y = std::sqrt(std::max(1.0 - c_y * c_y, 0.0));
      phi = c_y * cos_m - sin_y * sin_m;
      dphi = cos_m + c_y / std::max(sin_y, kNormFloor) * sin_m;
    } else {
      phi = c_y - margin * sin_m;
      dphi = 1.0;
    }

    Vector logits = scale * cosines;
    logits(y) = scale * phi;
    const double mx = logits.maxCoeff();
    Vector p = (logits.array() - mx).exp();
    p /= p.sum();
    loss -= (logits(y) - mx - std::log((logits.array() - mx).exp().sum())) /
            static_cast<double>(n);

    if (!grad_embeddings && !grad_weights) continue;
    Vector g_logit = p / static_cast<double>(n);
    g_logit(y) -= 1.0 / static_cast<double>(n);
    Vector g_cos = scale * g_logit;
    g_cos(y) *= dphi;

    if (grad_embeddings) {
      Vector g_e_hat = w_hat.transpose() * g_cos;
      grad_embeddings->row(j) =
          ((g_e_hat - e_hat * e_hat.dot(g_e_hat)) / e_norm).transpose();
    }
    if (grad_weights) g_w_hat += g_cos * e_hat.transpose();
  }

  if (grad_weights) {
    grad_weights->setZero(C, weights.cols());
    for (Eigen::Index k = 0; k < C; ++k) {
      const Vector gk = g_w_hat.row(k).transpose();
      const Vector wk = w_hat.row(k).transpose();
      grad_weights->row(k) = ((gk - wk * wk.dot(gk)) / w_norms(k)).transpose();
    }
  }
  return loss;
}

double ce_loss(const Matrix& embeddings, const std::vector<int>& labels,
               const Matrix& weights, const Vector& bias,
               Matrix* grad_embeddings, Matrix* grad_weights,
               Vector* grad_bias) {
  const Eigen::Index n = embeddings.rows();
  const Eigen::Index C = weights.rows();
  SDSV_CHECK(static_cast<Eigen::Index>(labels.size()) == n,
             "label count mismatch");

  if (grad_embeddings) grad_embeddings->setZero(n, embeddings.cols());
  if (grad_weights) grad_weights->setZero(C, weights.cols());
  if (grad_bias) grad_bias->setZero(C);

  double loss = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const int y = labels[j];
    SDSV_CHECK(y >= 0 && y < C, "label out of range");
    Vector logits = weights * embeddings.row(j).transpose() + bias;
    const double mx = logits.maxCoeff();
    const double lse = mx + std::log((logits.array() - mx).exp().sum());
    loss -= (logits(y) - lse) / static_cast<double>(n);

    Vector p = (logits.array() - lse).exp();
    Vector g_logit = p / static_cast<double>(n);
    g_logit(y) -= 1.0 / static_cast<double>(n);
    if (grad_embeddings)
      grad_embeddings->row(j) = (weights.transpose() * g_logit).transpose();
    if (grad_weights) *grad_weights += g_logit * embeddings.row(j);
    if (grad_bias) *grad_bias += g_logit;
  }
  return loss;
}

std::vector<ParamRef> SupervisedModel::param_refs() {
  auto refs = encoder.param_refs();
  refs.push_back({"cls.w", w_cls.data(), w_cls.rows(), w_cls.cols()});
  refs.push_back({"cls.b", b_cls.data(), b_cls.size(), 1});
  return refs;
}

Vector utterance_embedding(const EncoderParams& enc, const Waveform& w,
                           const FeatureConfig& features) {
  Waveform trimmed = apply_vad(w, features);
  // fall back to the raw waveform when VAD leaves less than one frame
  const std::size_t min_samples = static_cast<std::size_t>(
      features.frame_len_s * w.sample_rate);
  const Waveform& use = trimmed.samples.size() < min_samples ? w : trimmed;
  FeatureMatrix f = sliding_mvn(logmel(use, features), features.mvn_window);
  return encoder_forward(enc, f, nullptr);
}

int predict_class(const SupervisedModel& model, const Waveform& w,
                  const FeatureConfig& features, LossKind loss) {
  const Vector e = utterance_embedding(model.encoder, w, features);
  Vector logits;
  if (loss == LossKind::kAAM) {
    const double en = std::max(e.norm(), kNormFloor);
    logits.resize(model.w_cls.rows());
    for (Eigen::Index k = 0; k < model.w_cls.rows(); ++k) {
      const double wn = std::max(model.w_cls.row(k).norm(), kNormFloor);
      logits(k) = model.w_cls.row(k).dot(e) / (wn * en);
    }
  } else {
    logits = model.w_cls * e + model.b_cls;
  }
  Eigen::Index best;
  logits.maxCoeff(&best);
  return static_cast<int>(best);
}

namespace {

struct PreparedUtt {
  std::string utt_id;
  Waveform wave;  // VAD-trimmed (falls back to raw if VAD empties it)
  int label = 0;
};

void shuffle_indices(std::vector<std::size_t>& idx, Rng& rng) {
  for (std::size_t i = idx.size(); i > 1; --i)
    std::swap(idx[i - 1], idx[rng.uniform_int(i)]);
}

// Random chunk of chunk_len_s; shorter utterances are padded in the feature
// domain per pad_mode.
FeatureMatrix supervised_view(const PreparedUtt& utt, double chunk_len_s,
                              PadMode pad_mode, bool augment,
                              const FeatureConfig& features,
                              const AugmentPolicy& policy, Rng& rng) {
  const int fs = utt.wave.sample_rate;
  const std::size_t want =
      static_cast<std::size_t>(std::lround(chunk_len_s * fs));
  Waveform chunk;
  chunk.sample_rate = fs;
  if (utt.wave.samples.size() > want) {
    const std::size_t start =
        rng.uniform_int(utt.wave.samples.size() - want + 1);
    chunk.samples.assign(utt.wave.samples.begin() + start,
                         utt.wave.samples.begin() + start + want);
  } else {
    chunk.samples = utt.wave.samples;
  }
  if (augment) chunk = augment_chunk(chunk, policy, rng);
  FeatureMatrix f = sliding_mvn(logmel(chunk, features), features.mvn_window);
  const int target = crop_frames(chunk_len_s, features.hop_s,
                                 features.frame_len_s);
  return pad_chunk(f, target, pad_mode);
}

std::vector<PreparedUtt> prepare_corpus(
    const std::vector<CorpusUtterance>& corpus, const std::vector<int>& labels,
    const FeatureConfig& features) {
  SDSV_CHECK(corpus.size() == labels.size(), "label count mismatch");
  std::vector<PreparedUtt> utts;
  const double min_dur_s = 2.0 * features.frame_len_s;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    PreparedUtt u;
    u.utt_id = corpus[i].utt_id;
    u.label = labels[i];
    Waveform trimmed = apply_vad(corpus[i].wave, features);
    u.wave = (trimmed.samples.size() >=
              static_cast<std::size_t>(min_dur_s * corpus[i].wave.sample_rate))
                 ? std::move(trimmed)
                 : corpus[i].wave;
    utts.push_back(std::move(u));
  }
  return utts;
}

struct EpochOutcome {
  double loss = 0.0;
  double accuracy = 0.0;
};

// One pass over the corpus: forward, loss, backward, Adam.
EpochOutcome run_epoch(std::vector<PreparedUtt>& utts, SupervisedModel& model,
                       std::vector<ParamRef>& params, AdamState& adam,
                       const AdamConfig& adam_cfg,
                       const std::vector<bool>* frozen, LossKind loss_kind,
                       const AAMConfig& aam, double margin, double lr,
                       double chunk_len_s, PadMode pad_mode, bool augment,
                       const FeatureConfig& features,
                       const AugmentPolicy& policy, int batch_size,
                       const Rng& master, int epoch) {
  const std::size_t n = utts.size();
  const std::size_t batch =
      std::min<std::size_t>(static_cast<std::size_t>(batch_size), n);

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng shuffle_rng = master.derive("shuffle").derive(epoch);
  shuffle_indices(order, shuffle_rng);

  EncoderParams enc_grads = model.encoder.zeros_like();
  auto enc_grad_refs = enc_grads.param_refs();
  Matrix g_w_cls(model.w_cls.rows(), model.w_cls.cols());
  Vector g_b_cls(model.b_cls.size());
  std::vector<ParamRef> grad_refs = enc_grad_refs;
  grad_refs.push_back({"cls.w", g_w_cls.data(), g_w_cls.rows(),
                       g_w_cls.cols()});
  grad_refs.push_back({"cls.b", g_b_cls.data(), g_b_cls.size(), 1});

  EpochOutcome out;
  long long n_steps = 0, n_correct = 0, n_seen = 0;
  for (std::size_t begin = 0; begin < n; begin += batch) {
    const std::size_t bsz = std::min(batch, n - begin);

    Matrix embeddings(bsz, model.encoder.cfg.embedding_dim);
    std::vector<int> batch_labels(bsz);
    std::vector<EncoderCache> caches(bsz);
    for (std::size_t bi = 0; bi < bsz; ++bi) {
      const PreparedUtt& u = utts[order[begin + bi]];
      Rng rng = master.derive("sample").derive(epoch).derive(u.utt_id);
      FeatureMatrix f = supervised_view(u, chunk_len_s, pad_mode, augment,
                                        features, policy, rng);
      embeddings.row(bi) =
          encoder_forward(model.encoder, f, &caches[bi]).transpose();
      batch_labels[bi] = u.label;
    }

    Matrix grad_emb;
    double loss;
    if (loss_kind == LossKind::kAAM) {
      g_b_cls.setZero();
      loss = aam_loss(embeddings, batch_labels, model.w_cls, aam.scale,
                      margin, &grad_emb, &g_w_cls);
    } else {
      loss = ce_loss(embeddings, batch_labels, model.w_cls, model.b_cls,
                     &grad_emb, &g_w_cls, &g_b_cls);
    }
    if (!std::isfinite(loss))
      throw DivergedError("diverged: non-finite supervised loss");

    for (auto& g : enc_grad_refs)
      Eigen::Map<Vector>(g.data, g.size()).setZero();
    for (std::size_t bi = 0; bi < bsz; ++bi)
      encoder_backward(model.encoder, caches[bi],
                       grad_emb.row(bi).transpose(), enc_grads);

    adam_step(params, grad_refs, adam, adam_cfg, lr, frozen);

    // Bookkeeping: batch accuracy from the margin-free logits.
    for (std::size_t bi = 0; bi < bsz; ++bi) {
      Vector logits;
      if (loss_kind == LossKind::kAAM) {
        const Vector e = embeddings.row(bi).transpose();
        const double en = std::max(e.norm(), kNormFloor);
        logits.resize(model.w_cls.rows());
        for (Eigen::Index k = 0; k < model.w_cls.rows(); ++k) {
          const double wn = std::max(model.w_cls.row(k).norm(), kNormFloor);
          logits(k) = model.w_cls.row(k).dot(e) / (wn * en);
        }
      } else {
        logits = model.w_cls * embeddings.row(bi).transpose() + model.b_cls;
      }
      Eigen::Index best;
      logits.maxCoeff(&best);
      if (static_cast<int>(best) == batch_labels[bi]) ++n_correct;
      ++n_seen;
    }
    out.loss += loss;
    ++n_steps;
  }
  out.loss /= static_cast<double>(n_steps);
  out.accuracy = static_cast<double>(n_correct) / static_cast<double>(n_seen);
  return out;
}

}  // namespace

SupervisedResult train_supervised(const std::vector<CorpusUtterance>& corpus,
                                  const std::vector<int>& labels,
                                  int n_classes, const SupervisedConfig& cfg,
                                  std::uint64_t seed,
                                  const SupervisedModel* init,
                                  bool freeze_pre_pooling) {
  SDSV_CHECK(n_classes >= 2, "need at least 2 classes");
  auto utts = prepare_corpus(corpus, labels, cfg.features);

  const Rng master(seed);
  Rng init_rng = master.derive("init");

  SupervisedResult res;
  if (init) {
    SDSV_CHECK(init->w_cls.rows() == n_classes,
               "init model class count mismatch");
    res.model = *init;
  } else {
    res.model.encoder = EncoderParams::init(cfg.encoder, init_rng);
    res.model.w_cls = Matrix::Zero(n_classes, cfg.encoder.embedding_dim);
    for (Eigen::Index i = 0; i < res.model.w_cls.rows(); ++i)
      for (Eigen::Index j = 0; j < res.model.w_cls.cols(); ++j)
        res.model.w_cls(i, j) = 0.1 * init_rng.gaussian();
    res.model.b_cls = Vector::Zero(n_classes);
  }

  auto params = res.model.param_refs();
  AdamState adam = AdamState::init(total_size(params));

  std::vector<bool> frozen(params.size(), false);
  if (freeze_pre_pooling)
    for (std::size_t i = 0; i < params.size(); ++i) {
      const std::string& nm = params[i].name;
      frozen[i] = !(nm == "enc.w_emb" || nm == "enc.b_emb" || nm == "cls.w" ||
                    nm == "cls.b");
    }

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double margin =
        (cfg.loss == LossKind::kAAM) ? margin_at(epoch, cfg.aam) : 0.0;
    EpochOutcome out = run_epoch(
        utts, res.model, params, adam, cfg.adam,
        freeze_pre_pooling ? &frozen : nullptr, cfg.loss, cfg.aam, margin,
        cfg.lr, cfg.chunk_len_s, cfg.pad_mode, cfg.augment, cfg.features,
        cfg.policy, cfg.batch_size, master, epoch);
    res.history.push_back(
        {epoch, out.loss, out.accuracy, margin, cfg.lr});
  }
  return res;
}

FinetuneResult finetune(const EncoderParams& pretrained,
                        const std::vector<CorpusUtterance>& corpus,
                        const std::vector<int>& labels, int n_classes,
                        const FinetuneConfig& cfg, std::uint64_t seed) {
  SDSV_CHECK(n_classes >= 2, "need at least 2 classes");
  auto utts = prepare_corpus(corpus, labels, cfg.features);

  const Rng master(seed);
  Rng init_rng = master.derive("init");

  FinetuneResult res;
  res.model.encoder = pretrained;
  res.model.w_cls = Matrix::Zero(n_classes, pretrained.cfg.embedding_dim);
  for (Eigen::Index i = 0; i < res.model.w_cls.rows(); ++i)
    for (Eigen::Index j = 0; j < res.model.w_cls.cols(); ++j)
      res.model.w_cls(i, j) = 0.1 * init_rng.gaussian();
  res.model.b_cls = Vector::Zero(n_classes);

  auto params = res.model.param_refs();

  // Held-out split for plateau detection.
  std::vector<std::size_t> order(utts.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng split_rng = master.derive("valid_split");
  shuffle_indices(order, split_rng);
  const std::size_t n_valid = std::max<std::size_t>(
      1, static_cast<std::size_t>(cfg.valid_fraction *
                                  static_cast<double>(utts.size())));
  std::vector<PreparedUtt> valid_utts, train_utts;
  for (std::size_t i = 0; i < order.size(); ++i)
    (i < n_valid ? valid_utts : train_utts).push_back(utts[order[i]]);
  SDSV_CHECK(!train_utts.empty(), "no training utterances after split");

  auto valid_loss = [&]() {
    Matrix emb(valid_utts.size(), res.model.encoder.cfg.embedding_dim);
    std::vector<int> vl(valid_utts.size());
    for (std::size_t i = 0; i < valid_utts.size(); ++i) {
      FeatureMatrix f = sliding_mvn(logmel(valid_utts[i].wave, cfg.features),
                                    cfg.features.mvn_window);
      emb.row(i) =
          encoder_forward(res.model.encoder, f, nullptr).transpose();
      vl[i] = valid_utts[i].label;
    }
    if (cfg.loss == LossKind::kAAM)
      return aam_loss(emb, vl, res.model.w_cls, cfg.aam.scale, 0.0, nullptr,
                      nullptr);
    return ce_loss(emb, vl, res.model.w_cls, res.model.b_cls, nullptr,
                   nullptr, nullptr);
  };

  // FT2 phase 1 freezes everything except the encoder's final embedding
  // affine and the new output layer.
  std::vector<bool> phase1_frozen(params.size(), false);
  for (std::size_t i = 0; i < params.size(); ++i) {
    const std::string& nm = params[i].name;
    phase1_frozen[i] = !(nm == "enc.w_emb" || nm == "enc.b_emb" ||
                         nm == "cls.w" || nm == "cls.b");
  }

  const int n_phases = (cfg.strategy == FinetuneStrategy::kFT2) ? 2 : 1;
  for (int phase = 0; phase < n_phases; ++phase) {
    const bool frozen_phase =
        (cfg.strategy == FinetuneStrategy::kFT2) && phase == 0;
    AdamState adam = AdamState::init(total_size(params));
    double lr = cfg.lr;
    double best = std::numeric_limits<double>::infinity();
    int stale = 0;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
      const double margin =
          (cfg.loss == LossKind::kAAM) ? margin_at(epoch, cfg.aam) : 0.0;
      EpochOutcome out = run_epoch(
          train_utts, res.model, params, adam, cfg.adam,
          frozen_phase ? &phase1_frozen : nullptr, cfg.loss, cfg.aam, margin,
          lr, cfg.chunk_len_s, cfg.pad_mode, cfg.augment, cfg.features,
          cfg.policy, cfg.batch_size, master.derive("phase").derive(phase),
          epoch);
      res.history.push_back(
          {phase * cfg.epochs + epoch, out.loss, out.accuracy, margin, lr});

      const double vl = valid_loss();
      if (vl < best - cfg.plateau_min_delta) {
        best = vl;
        stale = 0;
      } else if (++stale >= cfg.plateau_patience) {
        lr *= cfg.plateau_factor;
        stale = 0;
      }
    }
    if (frozen_phase) res.after_phase1 = res.model;
  }
  return res;
}

}  // namespace sdsv

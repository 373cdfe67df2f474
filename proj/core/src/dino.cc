// core/dino.cc

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

#include "sdsv/dino.hh"

#include <algorithm>
#include <cmath>

namespace sdsv {

double schedule_value(ScheduleKind kind, long long step, long long total,
                      double start, double end, long long warmup_steps) {
  SDSV_CHECK(step >= 0 && step <= total, "schedule step out of range");
  if (total == 0) return end;
  if (kind == ScheduleKind::kLinearWarmupCosine && warmup_steps > 0) {
    if (step < warmup_steps)
      return start * static_cast<double>(step) /
             static_cast<double>(warmup_steps);
    const long long span = total - warmup_steps;
    if (span <= 0) return end;
    const double t = static_cast<double>(step - warmup_steps) /
                     static_cast<double>(span);
    return end + (start - end) * (1.0 + std::cos(M_PI * t)) / 2.0;
  }
  const double t = static_cast<double>(step) / static_cast<double>(total);
  return end + (start - end) * (1.0 + std::cos(M_PI * t)) / 2.0;
}

Vector temp_softmax(const Vector& logits, double tau) {
  SDSV_CHECK(tau > 0.0, "temperature must be positive");
  Vector scaled = logits / tau;
  const double mx = scaled.maxCoeff();
  Vector e = (scaled.array() - mx).exp();
  return e / e.sum();
}

Vector teacher_distribution(const Vector& logits, const Vector& center,
                            double tau_t) {
  SDSV_CHECK(logits.size() == center.size(), "center dim mismatch");
  return temp_softmax(logits - center, tau_t);
}

double dino_loss(const std::vector<Vector>& teacher_probs,
                 const std::vector<Vector>& student_logits, double tau_s,
                 std::vector<Vector>* grad_logits) {
  SDSV_CHECK(teacher_probs.size() == 2, "expected exactly 2 teacher views");
  SDSV_CHECK(student_logits.size() >= 2, "need |S| >= 2 student views");
  const Eigen::Index K = teacher_probs[0].size();
  for (const auto& p : teacher_probs)
    SDSV_CHECK(p.size() == K, "teacher output dim mismatch");
  for (const auto& l : student_logits)
    SDSV_CHECK(l.size() == K, "student output dim mismatch");

  const std::size_t n_views = student_logits.size();
  const double n_pairs = 2.0 * static_cast<double>(n_views - 1);

  // Per-view student log-probs and probs (stable log-softmax).
  std::vector<Vector> log_p1(n_views), p1(n_views);
  for (std::size_t j = 0; j < n_views; ++j) {
    Vector scaled = student_logits[j] / tau_s;
    const double mx = scaled.maxCoeff();
    const double lse = mx + std::log((scaled.array() - mx).exp().sum());
    log_p1[j] = scaled.array() - lse;
    p1[j] = log_p1[j].array().exp();
  }

  if (grad_logits) {
    grad_logits->assign(n_views, Vector::Zero(K));
  }
  double loss = 0.0;
  // Teacher view ti is the student's long view with the same index, which
  // is excluded from its own pair set.
  for (std::size_t ti = 0; ti < 2; ++ti) {
    for (std::size_t j = 0; j < n_views; ++j) {
      if (j == ti) continue;
      loss -= teacher_probs[ti].dot(log_p1[j]) / n_pairs;
      if (grad_logits)
        (*grad_logits)[j] += (p1[j] - teacher_probs[ti]) / (tau_s * n_pairs);
    }
  }
  return loss;
}

void ema_update(std::vector<ParamRef>& teacher,
                const std::vector<ParamRef>& student, double lambda) {
  SDSV_CHECK(teacher.size() == student.size(), "ema shape mismatch");
  for (std::size_t i = 0; i < teacher.size(); ++i) {
    SDSV_CHECK(teacher[i].size() == student[i].size(), "ema shape mismatch");
    Eigen::Map<Vector> t(teacher[i].data, teacher[i].size());
    Eigen::Map<const Vector> s(student[i].data, student[i].size());
    t = lambda * t + (1.0 - lambda) * s;
  }
}

void center_update(Vector& center, const std::vector<Vector>& teacher_logits,
                   double momentum) {
  SDSV_CHECK(!teacher_logits.empty(), "empty teacher logit batch");
  Vector mean = Vector::Zero(center.size());
  for (const auto& l : teacher_logits) {
    SDSV_CHECK(l.size() == center.size(), "center dim mismatch");
    mean += l;
  }
  mean /= static_cast<double>(teacher_logits.size());
  center = momentum * center + (1.0 - momentum) * mean;
}

std::vector<ParamRef> DinoState::student_refs() {
  auto refs = student_enc.param_refs();
  auto head = student_head.param_refs();
  refs.insert(refs.end(), head.begin(), head.end());
  return refs;
}

std::vector<ParamRef> DinoState::teacher_refs() {
  auto refs = teacher_enc.param_refs();
  auto head = teacher_head.param_refs();
  refs.insert(refs.end(), head.begin(), head.end());
  return refs;
}

namespace {

struct TrainUtt {
  std::string utt_id;
  Waveform wave;  // VAD-trimmed
};

// Random chunk -> optional augmentation -> log-mel -> sliding MVN.
FeatureMatrix make_view(const TrainUtt& utt, double len_s,
                        const DinoConfig& cfg, Rng& rng) {
  const int fs = utt.wave.sample_rate;
  const std::size_t len = static_cast<std::size_t>(std::lround(len_s * fs));
  const std::size_t span = utt.wave.samples.size() - len;
  const std::size_t start = (span > 0) ? rng.uniform_int(span + 1) : 0;

  Waveform chunk;
  chunk.sample_rate = fs;
  chunk.samples.assign(utt.wave.samples.begin() + start,
                       utt.wave.samples.begin() + start + len);
  if (cfg.augment) chunk = augment_chunk(chunk, cfg.policy, rng);
  FeatureMatrix f = logmel(chunk, cfg.features);
  return sliding_mvn(f, cfg.features.mvn_window);
}

void shuffle_indices(std::vector<std::size_t>& idx, Rng& rng) {
  for (std::size_t i = idx.size(); i > 1; --i)
    std::swap(idx[i - 1], idx[rng.uniform_int(i)]);
}

}  // namespace

DinoResult train_dino(const std::vector<CorpusUtterance>& corpus,
                      const DinoConfig& cfg, std::uint64_t seed) {
  SDSV_CHECK(cfg.tau_t < cfg.tau_s, "sharpening requires tau_t < tau_s");
  SDSV_CHECK(cfg.center_momentum >= 0.0 && cfg.center_momentum < 1.0,
             "center momentum must be in [0, 1)");

  // VAD-trim; drop anything shorter than one long crop.
  std::vector<TrainUtt> utts;
  for (const auto& u : corpus) {
    Waveform trimmed = apply_vad(u.wave, cfg.features);
    const std::size_t need = static_cast<std::size_t>(
        std::lround(cfg.crop.len_long_s * u.wave.sample_rate));
    if (trimmed.samples.size() >= need)
      utts.push_back({u.utt_id, std::move(trimmed)});
  }
  SDSV_CHECK(!utts.empty(), "no utterance is long enough after VAD");

  const Rng master(seed);
  Rng init_rng = master.derive("init");

  DinoResult res;
  DinoState& st = res.state;
  st.student_enc = EncoderParams::init(cfg.encoder, init_rng);
  st.student_head = HeadParams::init(cfg.head, init_rng);
  st.teacher_enc = st.student_enc;
  st.teacher_head = st.student_head;
  st.center = Vector::Zero(cfg.head.out_dim);
  auto student = st.student_refs();
  auto teacher = st.teacher_refs();
  st.adam = AdamState::init(total_size(student));

  // Freeze mask for the head's final (weight-normalized) layer.
  std::vector<bool> freeze_last(student.size(), false);
  for (std::size_t i = 0; i < student.size(); ++i)
    if (student[i].name == "head.v_dir") freeze_last[i] = true;

  const std::size_t n = utts.size();
  const std::size_t batch =
      std::min<std::size_t>(static_cast<std::size_t>(cfg.batch_size), n);
  const long long steps_per_epoch =
      static_cast<long long>((n + batch - 1) / batch);
  const long long total_steps = cfg.epochs * steps_per_epoch;
  const long long warmup_steps = cfg.warmup_epochs * steps_per_epoch;

  EncoderParams enc_grads = st.student_enc.zeros_like();
  HeadParams head_grads = st.student_head.zeros_like();
  auto grad_refs = enc_grads.param_refs();
  {
    auto hg = head_grads.param_refs();
    grad_refs.insert(grad_refs.end(), hg.begin(), hg.end());
  }

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    st.epoch = epoch;
    Rng shuffle_rng = master.derive("shuffle").derive(epoch);
    shuffle_indices(order, shuffle_rng);

    DinoEpochStats stats;
    stats.epoch = epoch;
    long long n_teacher_views = 0;

    for (std::size_t begin = 0; begin < n; begin += batch) {
      const std::size_t bsz = std::min(batch, n - begin);
      const double lr =
          schedule_value(ScheduleKind::kLinearWarmupCosine, st.step,
                         total_steps, cfg.lr, cfg.lr_min, warmup_steps);
      const double lambda =
          schedule_value(ScheduleKind::kCosine, st.step, total_steps,
                         cfg.teacher_momentum_start, cfg.teacher_momentum_end);

      for (auto& g : grad_refs)
        Eigen::Map<Vector>(g.data, g.size()).setZero();
      double batch_loss = 0.0;
      std::vector<Vector> teacher_logit_batch;

      for (std::size_t bi = 0; bi < bsz; ++bi) {
        const TrainUtt& utt = utts[order[begin + bi]];
        Rng rng = master.derive("sample").derive(epoch).derive(utt.utt_id);

        std::vector<FeatureMatrix> views;  // long views first
        for (int i = 0; i < cfg.crop.n_long; ++i)
          views.push_back(make_view(utt, cfg.crop.len_long_s, cfg, rng));
        for (int i = 0; i < cfg.crop.n_short; ++i)
          views.push_back(make_view(utt, cfg.crop.len_short_s, cfg, rng));

        // Teacher path: forward-only, no caches, so no gradient can exist.
        std::vector<Vector> teacher_probs;
        for (int i = 0; i < 2; ++i) {
          Vector e = encoder_forward(st.teacher_enc, views[i], nullptr);
          Vector logits = head_forward(st.teacher_head, e, nullptr);
          teacher_logit_batch.push_back(logits);
          Vector p2 = cfg.centering
                          ? teacher_distribution(logits, st.center, cfg.tau_t)
                          : temp_softmax(logits, cfg.tau_t);
          stats.teacher_entropy +=
              -(p2.array() * (p2.array() + 1e-300).log()).sum();
          stats.teacher_max_prob += p2.maxCoeff();
          ++n_teacher_views;
          teacher_probs.push_back(std::move(p2));
        }

        // Student path with caches for backward.
        std::vector<EncoderCache> enc_caches(views.size());
        std::vector<HeadCache> head_caches(views.size());
        std::vector<Vector> student_logits(views.size());
        for (std::size_t j = 0; j < views.size(); ++j) {
          Vector e =
              encoder_forward(st.student_enc, views[j], &enc_caches[j]);
          student_logits[j] =
              head_forward(st.student_head, e, &head_caches[j]);
        }

        std::vector<Vector> grad_logits;
        const double loss =
            dino_loss(teacher_probs, student_logits, cfg.tau_s, &grad_logits);
        batch_loss += loss / static_cast<double>(bsz);

        for (std::size_t j = 0; j < views.size(); ++j) {
          Vector gl = grad_logits[j] / static_cast<double>(bsz);
          Vector ge =
              head_backward(st.student_head, head_caches[j], gl, head_grads);
          encoder_backward(st.student_enc, enc_caches[j], ge, enc_grads);
        }
      }

      if (!std::isfinite(batch_loss))
        throw DivergedError("diverged: non-finite DINO loss at step " +
                            std::to_string(st.step));
      stats.loss += batch_loss;

      const bool freeze = epoch < cfg.freeze_last_epochs;
      adam_step(student, grad_refs, st.adam, cfg.adam, lr,
                freeze ? &freeze_last : nullptr);
      st.student_head.renormalize_rows();
      ema_update(teacher, student, lambda);
      if (cfg.centering)
        center_update(st.center, teacher_logit_batch, cfg.center_momentum);

      st.step += 1;
      stats.lambda = lambda;
      stats.lr = lr;
    }

    stats.loss /= static_cast<double>(steps_per_epoch);
    stats.teacher_entropy /= static_cast<double>(n_teacher_views);
    stats.teacher_max_prob /= static_cast<double>(n_teacher_views);
    stats.center_norm = st.center.norm();
    res.history.push_back(stats);
  }
  return res;
}

}  // namespace sdsv

// core/cluster.cc

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

#include "sdsv/cluster.hh"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "sdsv/backend.hh"
#include "sdsv/eval.hh"
#include "sdsv/rng.hh"

namespace sdsv {

namespace {

ClusterAssignment finalize_assignment(std::vector<int> raw) {
  // Relabel to dense ids ordered by first occurrence, for determinism.
  ClusterAssignment out;
  std::map<int, int> remap;
  out.labels.reserve(raw.size());
  for (int r : raw) {
    auto it = remap.find(r);
    if (it == remap.end())
      it = remap.emplace(r, static_cast<int>(remap.size())).first;
    out.labels.push_back(it->second);
  }
  out.n_clusters = static_cast<int>(remap.size());
  out.sizes.assign(out.n_clusters, 0);
  for (int l : out.labels) ++out.sizes[l];
  return out;
}

}  // namespace

KMeansResult kmeans(const Matrix& embeddings, int k, int max_iter,
                    std::uint64_t seed) {
  const int n = static_cast<int>(embeddings.rows());
  const int d = static_cast<int>(embeddings.cols());
  SDSV_CHECK(n > 0 && k >= 1 && k <= n, "kmeans: need 1 <= k <= n");
  SDSV_CHECK(max_iter >= 1, "kmeans: max_iter must be positive");
  Rng rng(seed);

  // k-means++ seeding: first center uniform, then D^2-weighted.
  Matrix centers(k, d);
  centers.row(0) = embeddings.row(rng.uniform_int(n));
  Vector d2 = (embeddings.rowwise() - centers.row(0))
                  .rowwise().squaredNorm();
  for (int c = 1; c < k; ++c) {
    const double total = d2.sum();
    int pick = 0;
    if (total > 0.0) {
      double r = rng.uniform() * total, acc = 0.0;
      for (int i = 0; i < n; ++i) {
        acc += d2[i];
        if (r < acc) { pick = i; break; }
        pick = i;
      }
    } else {
      pick = rng.uniform_int(n);  // all points coincide with a center
    }
    centers.row(c) = embeddings.row(pick);
    d2 = d2.cwiseMin(
        (embeddings.rowwise() - centers.row(c)).rowwise().squaredNorm());
  }

  std::vector<int> assign(n, -1);
  KMeansResult res;
  for (int iter = 0; iter < max_iter; ++iter) {
    // Assignment step; nearest center, smallest index on ties.
    bool changed = false;
    double inertia = 0.0;
    for (int i = 0; i < n; ++i) {
      int best = 0;
      double bd = (embeddings.row(i) - centers.row(0)).squaredNorm();
      for (int c = 1; c < k; ++c) {
        const double dd = (embeddings.row(i) - centers.row(c)).squaredNorm();
        if (dd < bd) { bd = dd; best = c; }
      }
      inertia += bd;
      if (assign[i] != best) { assign[i] = best; changed = true; }
    }
    res.inertia_history.push_back(inertia);
    res.inertia = inertia;
    if (!changed && iter > 0) break;

    // Update step.
    Matrix sums = Matrix::Zero(k, d);
    std::vector<int> counts(k, 0);
    for (int i = 0; i < n; ++i) {
      sums.row(assign[i]) += embeddings.row(i);
      ++counts[assign[i]];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[c] > 0) {
        centers.row(c) = sums.row(c) / counts[c];
      } else {
        // Re-seed an empty cluster from the point farthest from its center.
        int far = 0;
        double fd = -1.0;
        for (int i = 0; i < n; ++i) {
          const double dd =
              (embeddings.row(i) - centers.row(assign[i])).squaredNorm();
          if (dd > fd) { fd = dd; far = i; }
        }
        centers.row(c) = embeddings.row(far);
        assign[far] = c;
      }
    }
  }
  res.centers = centers;
  ClusterAssignment a;
  a.labels = assign;
  a.n_clusters = k;
  a.sizes.assign(k, 0);
  for (int l : assign) ++a.sizes[l];
  res.assignment = a;
  return res;
}

ClusterAssignment ahc(const Matrix& items, int n_clusters) {
  const int n = static_cast<int>(items.rows());
  SDSV_CHECK(n > 0 && n_clusters >= 1 && n_clusters <= n,
             "ahc: need 1 <= n_clusters <= n");
  // Pairwise cosine distance; average linkage maintained with the
  // Lance-Williams update, so merged distances stay exact pair averages.
  Matrix dist(n, n);
  for (int i = 0; i < n; ++i) {
    dist(i, i) = 0.0;
    for (int j = i + 1; j < n; ++j) {
      Vector vi = items.row(i), vj = items.row(j);
      const double dd = 1.0 - cosine_score(vi, vj);
      dist(i, j) = dd;
      dist(j, i) = dd;
    }
  }
  std::vector<bool> active(n, true);
  std::vector<int> size(n, 1);
  std::vector<int> label(n);
  std::iota(label.begin(), label.end(), 0);

  int remaining = n;
  while (remaining > n_clusters) {
    int bi = -1, bj = -1;
    double bd = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      if (!active[i]) continue;
      for (int j = i + 1; j < n; ++j) {
        if (!active[j]) continue;
        if (dist(i, j) < bd) { bd = dist(i, j); bi = i; bj = j; }
      }
    }
    // Merge bj into bi (bi < bj, so ties already favor the smallest pair).
    for (int k = 0; k < n; ++k) {
      if (!active[k] || k == bi || k == bj) continue;
      const double dd =
          (size[bi] * dist(bi, k) + size[bj] * dist(bj, k)) /
          (size[bi] + size[bj]);
      dist(bi, k) = dd;
      dist(k, bi) = dd;
    }
    size[bi] += size[bj];
    active[bj] = false;
    for (int k = 0; k < n; ++k)
      if (label[k] == bj) label[k] = bi;
    --remaining;
  }
  return finalize_assignment(label);
}

PseudoLabelResult pseudo_label(const std::vector<CorpusUtterance>& corpus,
                               const EncoderParams& encoder,
                               const FeatureConfig& features, int kmeans_k,
                               int ahc_clusters, std::uint64_t seed) {
  const int n = static_cast<int>(corpus.size());
  SDSV_CHECK(n > 0, "pseudo_label: empty corpus");
  kmeans_k = std::min(kmeans_k, n);
  SDSV_CHECK(ahc_clusters >= 1 && ahc_clusters <= kmeans_k,
             "pseudo_label: need 1 <= ahc_clusters <= kmeans_k");
  Matrix emb(n, encoder.cfg.embedding_dim);
  for (int i = 0; i < n; ++i)
    emb.row(i) = utterance_embedding(encoder, corpus[i].wave, features);

  const KMeansResult km = kmeans(emb, kmeans_k, 100, seed);
  const ClusterAssignment coarse = ahc(km.centers, ahc_clusters);

  PseudoLabelResult out;
  std::vector<int> raw(n);
  for (int i = 0; i < n; ++i)
    raw[i] = coarse.labels[km.assignment.labels[i]];
  out.assignment = finalize_assignment(raw);
  out.labels.reserve(n);
  for (int i = 0; i < n; ++i)
    out.labels.emplace_back(corpus[i].utt_id, out.assignment.labels[i]);
  return out;
}

double cluster_purity(const std::vector<int>& pred,
                      const std::vector<int>& truth) {
  SDSV_CHECK(pred.size() == truth.size() && !pred.empty(),
             "cluster_purity: size mismatch");
  std::map<int, std::map<int, int>> tab;
  for (std::size_t i = 0; i < pred.size(); ++i) ++tab[pred[i]][truth[i]];
  long long hit = 0;
  for (const auto& [c, counts] : tab) {
    (void)c;
    int best = 0;
    for (const auto& [t, cnt] : counts) { (void)t; best = std::max(best, cnt); }
    hit += best;
  }
  return static_cast<double>(hit) / pred.size();
}

double pairwise_f1(const std::vector<int>& pred,
                   const std::vector<int>& truth) {
  SDSV_CHECK(pred.size() == truth.size() && !pred.empty(),
             "pairwise_f1: size mismatch");
  const int n = static_cast<int>(pred.size());
  long long tp = 0, fp = 0, fn = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const bool sp = pred[i] == pred[j];
      const bool st = truth[i] == truth[j];
      if (sp && st) ++tp;
      else if (sp && !st) ++fp;
      else if (!sp && st) ++fn;
    }
  }
  if (2 * tp + fp + fn == 0) return 1.0;  // no positive pairs anywhere
  return 2.0 * tp / (2.0 * tp + fp + fn);
}

namespace {

std::vector<int> speaker_ids(const std::vector<CorpusUtterance>& corpus) {
  std::map<std::string, int> ids;
  std::vector<int> out;
  out.reserve(corpus.size());
  for (const auto& u : corpus) {
    auto it = ids.find(u.speaker_id);
    if (it == ids.end())
      it = ids.emplace(u.speaker_id, static_cast<int>(ids.size())).first;
    out.push_back(it->second);
  }
  return out;
}

double heldout_cosine_eer(const EncoderParams& enc,
                          const std::vector<CorpusUtterance>& heldout,
                          const FeatureConfig& features) {
  const int n = static_cast<int>(heldout.size());
  std::vector<Vector> emb(n);
  for (int i = 0; i < n; ++i)
    emb[i] = utterance_embedding(enc, heldout[i].wave, features);
  std::vector<double> tgt, non;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double s = cosine_score(emb[i], emb[j]);
      if (heldout[i].speaker_id == heldout[j].speaker_id) tgt.push_back(s);
      else non.push_back(s);
    }
  }
  return eer(tgt, non);
}

}  // namespace

IterateResult iterate_pipeline(const std::vector<CorpusUtterance>& train,
                               const std::vector<CorpusUtterance>& heldout,
                               const EncoderParams& initial,
                               const IterateConfig& cfg, std::uint64_t seed) {
  IterateResult res;
  res.final_encoder = initial;
  if (cfg.cycles == 0) return res;
  SDSV_CHECK(cfg.ahc_clusters >= 1, "iterate: ahc_clusters required");
  SDSV_CHECK(!heldout.empty(), "iterate: held-out utterances required");

  const int kmeans_k =
      cfg.kmeans_k > 0 ? cfg.kmeans_k : 4 * cfg.ahc_clusters;
  const std::vector<int> truth = speaker_ids(train);
  Rng rng(seed);

  EncoderParams current = initial;
  SupervisedModel last_model;
  std::vector<int> last_pseudo;
  int last_n_classes = 0;
  bool have_model = false;

  for (int cycle = 1; cycle <= cfg.cycles; ++cycle) {
    const PseudoLabelResult pl =
        pseudo_label(train, current, cfg.train.features, kmeans_k,
                     cfg.ahc_clusters,
                     rng.derive("cluster").derive(cycle).next_u64());

    SupervisedConfig scfg = cfg.train;
    scfg.encoder.input_dim = cfg.train.features.n_mels;
    // Later cycles may afford a wider model than the first.
    if (cycle > 1 && cfg.width_multiplier > 1.0) {
      for (int& h : scfg.encoder.hidden_dims)
        h = static_cast<int>(std::lround(h * cfg.width_multiplier));
    }
    SupervisedResult sr;
    try {
      sr = train_supervised(train, pl.assignment.labels,
                            pl.assignment.n_clusters, scfg,
                            rng.derive("train").derive(cycle).next_u64());
    } catch (const DivergedError&) {
      break;  // keep the last model that trained cleanly
    }

    CycleMetrics m;
    m.cycle = cycle;
    m.n_pseudo_classes = pl.assignment.n_clusters;
    m.purity = cluster_purity(pl.assignment.labels, truth);
    m.pairwise_f1 = pairwise_f1(pl.assignment.labels, truth);
    m.eer = heldout_cosine_eer(sr.model.encoder, heldout, cfg.train.features);
    res.metrics.push_back(m);

    last_model = sr.model;
    last_pseudo = pl.assignment.labels;
    last_n_classes = pl.assignment.n_clusters;
    have_model = true;
    current = sr.model.encoder;
    res.final_encoder = current;
  }

  if (have_model && cfg.robust_epochs > 0) {
    // Robust stage: same pseudo labels, pre-pooling stack frozen, larger
    // margin applied immediately.
    SupervisedConfig rcfg = cfg.train;
    rcfg.encoder = last_model.encoder.cfg;
    rcfg.epochs = cfg.robust_epochs;
    rcfg.loss = LossKind::kAAM;
    rcfg.aam.margin = cfg.robust_margin;
    rcfg.aam.margin_warmup_epochs = 0;
    try {
      SupervisedResult sr = train_supervised(
          train, last_pseudo, last_n_classes, rcfg,
          rng.derive("robust").next_u64(), &last_model,
          /*freeze_pre_pooling=*/true);
      CycleMetrics m;
      m.cycle = cfg.cycles + 1;
      m.n_pseudo_classes = last_n_classes;
      m.purity = res.metrics.back().purity;
      m.pairwise_f1 = res.metrics.back().pairwise_f1;
      m.eer =
          heldout_cosine_eer(sr.model.encoder, heldout, cfg.train.features);
      res.metrics.push_back(m);
      res.final_encoder = sr.model.encoder;
    } catch (const DivergedError&) {
      // keep the pre-robust encoder
    }
  }
  return res;
}

}  // namespace sdsv

// tests/test_cluster.cc

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

#include <doctest.h>

#include <cmath>
#include <map>
#include <set>
#include <vector>

#include "sdsv/cluster.hh"
#include "sdsv/rng.hh"
#include "test_helpers.hh"

using namespace sdsv;

namespace {

// Three well-separated Gaussian blobs.
Matrix blobs(int per_blob, std::uint64_t seed, std::vector<int>* truth) {
  Rng rng(seed);
  Matrix x(3 * per_blob, 2);
  const double cx[3] = {0.0, 20.0, -15.0};
  const double cy[3] = {0.0, 5.0, 18.0};
  for (int b = 0; b < 3; ++b)
    for (int i = 0; i < per_blob; ++i) {
      x(b * per_blob + i, 0) = cx[b] + rng.gaussian();
      x(b * per_blob + i, 1) = cy[b] + rng.gaussian();
      if (truth) truth->push_back(b);
    }
  return x;
}

}  // namespace

TEST_CASE("kmeans: k = n puts every point in its own cluster") {
  Rng rng(1);
  const Matrix x = test::random_matrix(7, 3, rng);
  const KMeansResult r = kmeans(x, 7, 50, 2);
  CHECK(r.assignment.n_clusters == 7);
  CHECK(r.inertia == doctest::Approx(0.0));
  std::set<int> seen(r.assignment.labels.begin(), r.assignment.labels.end());
  CHECK(seen.size() == 7);
}

TEST_CASE("kmeans: three separated blobs are recovered with purity 1") {
  std::vector<int> truth;
  const Matrix x = blobs(40, 3, &truth);
  const KMeansResult r = kmeans(x, 3, 100, 4);
  CHECK(r.assignment.n_clusters == 3);
  CHECK(cluster_purity(r.assignment.labels, truth) == 1.0);
  CHECK(pairwise_f1(r.assignment.labels, truth) == 1.0);
  // sizes bookkeeping is consistent
  int total = 0;
  for (int s : r.assignment.sizes) total += s;
  CHECK(total == 120);
}

TEST_CASE("kmeans: inertia history never increases") {
  Rng rng(5);
  const Matrix x = test::random_matrix(150, 4, rng);
  const KMeansResult r = kmeans(x, 6, 100, 6);
  REQUIRE(!r.inertia_history.empty());
  for (std::size_t i = 1; i < r.inertia_history.size(); ++i)
    CHECK(r.inertia_history[i] <= r.inertia_history[i - 1] + 1e-9);
  CHECK(r.inertia == r.inertia_history.back());
  // inertia equals the direct sum of squared distances to own centers
  double direct = 0.0;
  for (int i = 0; i < 150; ++i)
    direct += (x.row(i) - r.centers.row(r.assignment.labels[i])).squaredNorm();
  CHECK(r.inertia == doctest::Approx(direct).epsilon(1e-10));
}

TEST_CASE("kmeans: deterministic in the seed") {
  Rng rng(7);
  const Matrix x = test::random_matrix(60, 3, rng);
  const KMeansResult a = kmeans(x, 5, 100, 11);
  const KMeansResult b = kmeans(x, 5, 100, 11);
  CHECK(a.assignment.labels == b.assignment.labels);
  CHECK((a.centers - b.centers).cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.inertia == b.inertia);
}

TEST_CASE("ahc: n_clusters = n is the identity partition") {
  Rng rng(8);
  const Matrix x = test::random_matrix(6, 3, rng);
  const ClusterAssignment a = ahc(x, 6);
  CHECK(a.n_clusters == 6);
  std::set<int> seen(a.labels.begin(), a.labels.end());
  CHECK(seen.size() == 6);
}

TEST_CASE("ahc: merges directionally similar items first") {
  // two groups of directions on the unit circle
  Matrix x(6, 2);
  auto dir = [](double deg) {
    return Eigen::RowVector2d(std::cos(deg * M_PI / 180.0),
                              std::sin(deg * M_PI / 180.0));
  };
  x.row(0) = dir(0.0);
  x.row(1) = dir(8.0);
  x.row(2) = dir(4.0);
  x.row(3) = dir(170.0);
  x.row(4) = dir(178.0);
  x.row(5) = 5.0 * dir(174.0);  // cosine distance ignores magnitude
  const ClusterAssignment a = ahc(x, 2);
  CHECK(a.n_clusters == 2);
  CHECK(a.labels[0] == a.labels[1]);
  CHECK(a.labels[1] == a.labels[2]);
  CHECK(a.labels[3] == a.labels[4]);
  CHECK(a.labels[4] == a.labels[5]);
  CHECK(a.labels[0] != a.labels[3]);
}

TEST_CASE("ahc: single cluster lumps everything") {
  Rng rng(9);
  const Matrix x = test::random_matrix(5, 4, rng);
  const ClusterAssignment a = ahc(x, 1);
  CHECK(a.n_clusters == 1);
  for (int l : a.labels) CHECK(l == 0);
}

TEST_CASE("cluster_purity / pairwise_f1: hand-checked values") {
  // pred lumps {0,1} and splits {2} from {3}
  const std::vector<int> pred = {0, 0, 1, 2};
  const std::vector<int> truth = {0, 1, 2, 2};
  // purity: cluster 0 majority 1 of 2, clusters 1 and 2 pure -> (1+1+1)/4
  CHECK(cluster_purity(pred, truth) == doctest::Approx(0.75));
  // pairs: pred pairs {01}; truth pairs {23}; no overlap -> f1 = 0
  CHECK(pairwise_f1(pred, truth) == 0.0);
  // perfect match up to a relabeling
  const std::vector<int> perm = {2, 2, 0, 1};
  const std::vector<int> t2 = {0, 0, 1, 2};
  CHECK(cluster_purity(perm, t2) == 1.0);
  CHECK(pairwise_f1(perm, t2) == 1.0);
}

TEST_CASE("pseudo_label: propagates center clusters consistently") {
  SyntheticCorpusSpec spec;
  spec.n_speakers = 4;
  spec.utts_per_speaker = 4;
  spec.dur_lo_s = 5.0;
  spec.dur_hi_s = 6.0;
  spec.seed = 13;
  const auto corpus = synth_corpus(spec);

  FeatureConfig feats;
  EncoderConfig ecfg;
  ecfg.input_dim = feats.n_mels;
  ecfg.hidden_dims = {16};
  ecfg.embedding_dim = 8;
  Rng rng(14);
  const EncoderParams enc = EncoderParams::init(ecfg, rng);

  const PseudoLabelResult r = pseudo_label(corpus, enc, feats, 8, 4, 15);
  REQUIRE(r.labels.size() == corpus.size());
  std::set<int> ids;
  for (const auto& [utt, id] : r.labels) {
    CHECK(id >= 0);
    CHECK(id < 4);
    ids.insert(id);
  }
  CHECK(static_cast<int>(ids.size()) == r.assignment.n_clusters);
  // order matches the corpus
  for (std::size_t i = 0; i < corpus.size(); ++i)
    CHECK(r.labels[i].first == corpus[i].utt_id);
  // deterministic
  const PseudoLabelResult r2 = pseudo_label(corpus, enc, feats, 8, 4, 15);
  CHECK(r.labels == r2.labels);
}

TEST_CASE("loss is invariant to relabeling classes with their rows") {
  // pseudo-label ids are arbitrary: permuting labels together with the
  // matching classifier rows must not change either loss
  Rng rng(16);
  const int n = 8, d = 5, C = 4;
  const Matrix E = test::random_matrix(n, d, rng);
  const Matrix W = test::random_matrix(C, d, rng);
  const Vector b = test::random_vector(C, rng);
  std::vector<int> y = {0, 1, 2, 3, 0, 2, 1, 3};

  const int perm[C] = {2, 0, 3, 1};  // old id -> new id
  std::vector<int> y2;
  for (int l : y) y2.push_back(perm[l]);
  Matrix W2(C, d);
  Vector b2(C);
  for (int k = 0; k < C; ++k) {
    W2.row(perm[k]) = W.row(k);
    b2(perm[k]) = b(k);
  }
  CHECK(aam_loss(E, y, W, 30.0, 0.2, nullptr, nullptr) ==
        doctest::Approx(aam_loss(E, y2, W2, 30.0, 0.2, nullptr, nullptr))
            .epsilon(1e-12));
  CHECK(ce_loss(E, y, W, b, nullptr, nullptr, nullptr) ==
        doctest::Approx(ce_loss(E, y2, W2, b2, nullptr, nullptr, nullptr))
            .epsilon(1e-12));
}

TEST_CASE("iterate_pipeline: zero cycles returns the initial encoder") {
  SyntheticCorpusSpec spec;
  spec.n_speakers = 2;
  spec.utts_per_speaker = 3;
  spec.dur_lo_s = 5.0;
  spec.dur_hi_s = 6.0;
  spec.seed = 18;
  const auto corpus = synth_corpus(spec);

  IterateConfig cfg;
  cfg.cycles = 0;
  cfg.ahc_clusters = 2;
  cfg.train.encoder.input_dim = cfg.train.features.n_mels;
  cfg.train.encoder.hidden_dims = {10};
  cfg.train.encoder.embedding_dim = 5;
  Rng rng(19);
  EncoderParams initial = EncoderParams::init(cfg.train.encoder, rng);
  EncoderParams copy = initial;

  IterateResult r = iterate_pipeline(corpus, corpus, initial, cfg, 20);
  CHECK(test::bitwise_equal(r.final_encoder.param_refs(), copy.param_refs()));
  CHECK(r.metrics.empty());
}

TEST_CASE("iterate_pipeline: one cycle produces sane metrics") {
  SyntheticCorpusSpec spec;
  spec.n_speakers = 4;
  spec.utts_per_speaker = 4;
  spec.dur_lo_s = 5.0;
  spec.dur_hi_s = 6.0;
  spec.seed = 21;
  const auto train = synth_corpus(spec);
  spec.seed = 22;
  const auto heldout = synth_corpus(spec);

  IterateConfig cfg;
  cfg.cycles = 1;
  cfg.ahc_clusters = 4;
  cfg.robust_epochs = 2;
  cfg.train.epochs = 3;
  cfg.train.batch_size = 8;
  cfg.train.encoder.input_dim = cfg.train.features.n_mels;
  cfg.train.encoder.hidden_dims = {16};
  cfg.train.encoder.embedding_dim = 8;
  Rng rng(23);
  const EncoderParams initial = EncoderParams::init(cfg.train.encoder, rng);

  IterateResult r = iterate_pipeline(train, heldout, initial, cfg, 24);
  REQUIRE(r.metrics.size() == 2);  // cycle 1 + robust stage
  CHECK(r.metrics[0].cycle == 1);
  CHECK(r.metrics[1].cycle == 2);
  for (const auto& m : r.metrics) {
    CHECK(m.eer >= 0.0);
    CHECK(m.eer <= 1.0);
    CHECK(m.purity > 0.0);
    CHECK(m.purity <= 1.0);
    CHECK(m.pairwise_f1 >= 0.0);
    CHECK(m.pairwise_f1 <= 1.0);
    CHECK(m.n_pseudo_classes >= 1);
    CHECK(m.n_pseudo_classes <= 4);
  }
  // deterministic end to end
  IterateResult r2 = iterate_pipeline(train, heldout, initial, cfg, 24);
  CHECK(test::bitwise_equal(r.final_encoder.param_refs(),
                            r2.final_encoder.param_refs()));
}

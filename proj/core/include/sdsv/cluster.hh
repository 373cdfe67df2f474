// core/cluster.hh

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

#ifndef SDSV_CLUSTER_HH_
#define SDSV_CLUSTER_HH_

#include <cstdint>
#include <string>
#include <vector>

#include "sdsv/common.hh"
#include "sdsv/supervised.hh"
#include "sdsv/synth.hh"

namespace sdsv {

struct ClusterAssignment {
  std::vector<int> labels;  // per item, dense ids 0..n_clusters-1
  int n_clusters = 0;
  std::vector<int> sizes;
};

struct KMeansResult {
  ClusterAssignment assignment;
  Matrix centers;  // k x d
  double inertia = 0.0;
  std::vector<double> inertia_history;  // non-increasing over Lloyd steps
};

// k-means++ seeding followed by Lloyd iterations until the assignment is
// fixed or max_iter; empty clusters are re-seeded from the farthest point.
KMeansResult kmeans(const Matrix& embeddings, int k, int max_iter,
                    std::uint64_t seed);

// Average-linkage agglomerative clustering on cosine distance, merging
// until n_clusters remain; ties broken by the smallest (i, j) index pair.
ClusterAssignment ahc(const Matrix& items, int n_clusters);

struct PseudoLabelResult {
  std::vector<std::pair<std::string, int>> labels;  // utt_id -> pseudo id
  ClusterAssignment assignment;
};

// Embeddings from the encoder -> k-means -> AHC over the k-means centers ->
// center-cluster ids propagated to utterances.
PseudoLabelResult pseudo_label(const std::vector<CorpusUtterance>& corpus,
                               const EncoderParams& encoder,
                               const FeatureConfig& features, int kmeans_k,
                               int ahc_clusters, std::uint64_t seed);

// Cluster quality against reference labels.
double cluster_purity(const std::vector<int>& pred,
                      const std::vector<int>& truth);
double pairwise_f1(const std::vector<int>& pred,
                   const std::vector<int>& truth);

struct IterateConfig {
  int cycles = 2;
  int kmeans_k = 0;       // 0: 4x ahc_clusters
  int ahc_clusters = 0;   // required
  SupervisedConfig train;
  double width_multiplier = 2.0;  // per-cycle "larger model" hidden widths
  int robust_epochs = 10;
  double robust_margin = 0.5;
};

struct CycleMetrics {
  int cycle = 0;  // 1-based; cycles+1 denotes the robust stage
  double eer = 0.0;
  double purity = 0.0;
  double pairwise_f1 = 0.0;
  int n_pseudo_classes = 0;
};

struct IterateResult {
  EncoderParams final_encoder;
  std::vector<CycleMetrics> metrics;
};

// Iterative pseudo-labeling: per cycle pseudo-label the training corpus
// with the current encoder, train a fresh supervised model on the pseudo
// labels, and evaluate held-out cosine EER.  After the final cycle the
// robust stage continues training with the pre-pooling stack frozen and a
// larger margin.  Cycles = 0 returns the initial encoder unchanged.
IterateResult iterate_pipeline(const std::vector<CorpusUtterance>& train,
                               const std::vector<CorpusUtterance>& heldout,
                               const EncoderParams& initial,
                               const IterateConfig& cfg, std::uint64_t seed);

}  // namespace sdsv

#endif  // SDSV_CLUSTER_HH_

// core/textio.hh

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

#ifndef SDSV_TEXTIO_HH_
#define SDSV_TEXTIO_HH_

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "sdsv/common.hh"

namespace sdsv {

// One corpus utterance as listed in a manifest.
struct ManifestEntry {
  std::string utt_id;
  std::string speaker_id;
  int attr_class = 0;
  std::string path;
};

// Round-trip-exact decimal formatting (17 significant digits).
std::string format_double(double v);

// Manifest: one line per utterance "<utt_id> <speaker_id> <attr_class> <path>".
std::vector<ManifestEntry> read_manifest(const std::string& path);
void write_manifest(const std::string& path,
                    const std::vector<ManifestEntry>& entries);

// Feature archive: per record a "<utt_id> <T> <D>" header line followed by
// T rows of D space-separated decimals.
void write_feature_archive(
    const std::string& path,
    const std::vector<std::pair<std::string, FeatureMatrix>>& records);
std::vector<std::pair<std::string, FeatureMatrix>> read_feature_archive(
    const std::string& path);

// Embeddings: one line per utterance "<utt_id> <d values>".
void write_embeddings(const std::string& path,
                      const std::vector<std::pair<std::string, Vector>>& embs);
std::vector<std::pair<std::string, Vector>> read_embeddings(
    const std::string& path);

// Trial list: "<enroll_id> <test_id> [target|nontarget]".
struct Trial {
  std::string enroll_id;
  std::string test_id;
  int label = -1;  // 1 target, 0 nontarget, -1 unlabeled
};
std::vector<Trial> read_trials(const std::string& path);
void write_trials(const std::string& path, const std::vector<Trial>& trials);

// Score file: "<enroll_id> <test_id> <score>".
struct ScoredTrial {
  std::string enroll_id;
  std::string test_id;
  double score = 0.0;
};
std::vector<ScoredTrial> read_scores(const std::string& path);
void write_scores(const std::string& path,
                  const std::vector<ScoredTrial>& scores);

// Pseudo-label file: "<utt_id> <pseudo_speaker_id>".
void write_pseudo_labels(const std::string& path,
                         const std::vector<std::pair<std::string, int>>& rows);
std::vector<std::pair<std::string, int>> read_pseudo_labels(
    const std::string& path);

}  // namespace sdsv

#endif  // SDSV_TEXTIO_HH_

// core/checkpoint.hh

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

#ifndef SDSV_CHECKPOINT_HH_
#define SDSV_CHECKPOINT_HH_

#include <string>
#include <vector>

#include "sdsv/nn.hh"

namespace sdsv {

inline constexpr int kCheckpointVersion = 1;

// Text checkpoint: "<format_version> <config_hash>" header line, then per
// block "<name> <rows> <cols>" followed by the values (17 significant
// digits, bit-exact round trip).
void save_checkpoint(const std::string& path, const std::string& config_hash,
                     const std::vector<ParamRef>& blocks);

// Loads into pre-shaped blocks; names and shapes must match the file.
// Returns the stored config hash.
std::string load_checkpoint(const std::string& path,
                            std::vector<ParamRef>& blocks);

// Reads only the header's config hash.
std::string checkpoint_config_hash(const std::string& path);

// Generic reader: all blocks as named matrices, shapes taken from the file.
// Lets tools rebuild a model whose dimensions differ from the current
// config (e.g. the wider encoders grown by the pseudo-labeling cycles).
struct CheckpointBlock {
  std::string name;
  Matrix value;
};
struct CheckpointFile {
  std::string config_hash;
  std::vector<CheckpointBlock> blocks;

  const Matrix& at(const std::string& name) const;
  bool has(const std::string& name) const;
};
CheckpointFile read_checkpoint(const std::string& path);

}  // namespace sdsv

#endif  // SDSV_CHECKPOINT_HH_

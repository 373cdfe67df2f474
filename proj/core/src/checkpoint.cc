// core/checkpoint.cc

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

#include "sdsv/checkpoint.hh"

#include <fstream>

#include "sdsv/textio.hh"

namespace sdsv {

void save_checkpoint(const std::string& path, const std::string& config_hash,
                     const std::vector<ParamRef>& blocks) {
  std::ofstream os(path);
  SDSV_CHECK(os.good(), "cannot write checkpoint: " + path);
  os << kCheckpointVersion << ' ' << config_hash << '\n';
  for (const auto& b : blocks) {
    os << b.name << ' ' << b.rows << ' ' << b.cols << '\n';
    for (Eigen::Index i = 0; i < b.size(); ++i) {
      if (i) os << ' ';
      os << format_double(b.data[i]);
    }
    os << '\n';
  }
}

std::string load_checkpoint(const std::string& path,
                            std::vector<ParamRef>& blocks) {
  std::ifstream is(path);
  SDSV_CHECK(is.good(), "cannot open checkpoint: " + path);
  int version;
  std::string hash;
  SDSV_CHECK(static_cast<bool>(is >> version >> hash),
             "bad checkpoint header: " + path);
  SDSV_CHECK(version == kCheckpointVersion,
             "unsupported checkpoint version in " + path);
  for (auto& b : blocks) {
    std::string name;
    Eigen::Index rows, cols;
    SDSV_CHECK(static_cast<bool>(is >> name >> rows >> cols),
               "truncated checkpoint: " + path);
    SDSV_CHECK(name == b.name, "checkpoint block mismatch: expected " +
                                   b.name + " got " + name);
    SDSV_CHECK(rows == b.rows && cols == b.cols,
               "checkpoint shape mismatch for block " + name);
    for (Eigen::Index i = 0; i < b.size(); ++i)
      SDSV_CHECK(static_cast<bool>(is >> b.data[i]),
                 "truncated checkpoint values: " + path);
  }
  return hash;
}

std::string checkpoint_config_hash(const std::string& path) {
  std::ifstream is(path);
  SDSV_CHECK(is.good(), "cannot open checkpoint: " + path);
  int version;
  std::string hash;
  SDSV_CHECK(static_cast<bool>(is >> version >> hash),
             "bad checkpoint header: " + path);
  return hash;
}

const Matrix& CheckpointFile::at(const std::string& name) const {
  for (const auto& b : blocks)
    if (b.name == name) return b.value;
  throw InputError("checkpoint has no block named " + name);
}

bool CheckpointFile::has(const std::string& name) const {
  for (const auto& b : blocks)
    if (b.name == name) return true;
  return false;
}

CheckpointFile read_checkpoint(const std::string& path) {
  std::ifstream is(path);
  SDSV_CHECK(is.good(), "cannot open checkpoint: " + path);
  int version;
  CheckpointFile f;
  SDSV_CHECK(static_cast<bool>(is >> version >> f.config_hash),
             "bad checkpoint header: " + path);
  SDSV_CHECK(version == kCheckpointVersion,
             "unsupported checkpoint version in " + path);
  std::string name;
  Eigen::Index rows, cols;
  while (is >> name >> rows >> cols) {
    SDSV_CHECK(rows >= 0 && cols >= 0, "bad block shape in " + path);
    CheckpointBlock b;
    b.name = name;
    b.value.resize(rows, cols);
    // Values are stored in the writer's flat (column-major) order; fill the
    // matrix storage directly so the order matches.
    for (Eigen::Index i = 0; i < rows * cols; ++i)
      SDSV_CHECK(static_cast<bool>(is >> b.value.data()[i]),
                 "truncated checkpoint values: " + path);
    f.blocks.push_back(std::move(b));
  }
  return f;
}

}  // namespace sdsv

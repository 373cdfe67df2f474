// core/textio.cc

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

#include "sdsv/textio.hh"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace sdsv {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::ifstream open_in(const std::string& path) {
  std::ifstream is(path);
  SDSV_CHECK(is.good(), "cannot open file: " + path);
  return is;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  SDSV_CHECK(os.good(), "cannot write file: " + path);
  return os;
}

}  // namespace

std::vector<ManifestEntry> read_manifest(const std::string& path) {
  auto is = open_in(path);
  std::vector<ManifestEntry> out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    ManifestEntry e;
    SDSV_CHECK(static_cast<bool>(ss >> e.utt_id >> e.speaker_id >>
                                 e.attr_class >> e.path),
               "bad manifest line in " + path + ": " + line);
    out.push_back(std::move(e));
  }
  return out;
}

void write_manifest(const std::string& path,
                    const std::vector<ManifestEntry>& entries) {
  auto os = open_out(path);
  for (const auto& e : entries)
    os << e.utt_id << ' ' << e.speaker_id << ' ' << e.attr_class << ' '
       << e.path << '\n';
}

void write_feature_archive(
    const std::string& path,
    const std::vector<std::pair<std::string, FeatureMatrix>>& records) {
  auto os = open_out(path);
  for (const auto& [id, f] : records) {
    os << id << ' ' << f.frames.rows() << ' ' << f.frames.cols() << '\n';
    for (Eigen::Index t = 0; t < f.frames.rows(); ++t) {
      for (Eigen::Index d = 0; d < f.frames.cols(); ++d) {
        if (d) os << ' ';
        os << format_double(f.frames(t, d));
      }
      os << '\n';
    }
  }
}

std::vector<std::pair<std::string, FeatureMatrix>> read_feature_archive(
    const std::string& path) {
  auto is = open_in(path);
  std::vector<std::pair<std::string, FeatureMatrix>> out;
  std::string id;
  Eigen::Index rows, cols;
  while (is >> id >> rows >> cols) {
    FeatureMatrix f;
    f.frames.resize(rows, cols);
    for (Eigen::Index t = 0; t < rows; ++t)
      for (Eigen::Index d = 0; d < cols; ++d)
        SDSV_CHECK(static_cast<bool>(is >> f.frames(t, d)),
                   "truncated feature archive: " + path);
    out.emplace_back(id, std::move(f));
  }
  return out;
}

void write_embeddings(const std::string& path,
                      const std::vector<std::pair<std::string, Vector>>& embs) {
  auto os = open_out(path);
  for (const auto& [id, e] : embs) {
    os << id;
    for (Eigen::Index i = 0; i < e.size(); ++i)
      os << ' ' << format_double(e(i));
    os << '\n';
  }
}

std::vector<std::pair<std::string, Vector>> read_embeddings(
    const std::string& path) {
  auto is = open_in(path);
  std::vector<std::pair<std::string, Vector>> out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string id;
    ss >> id;
    std::vector<double> vals;
    double v;
    while (ss >> v) vals.push_back(v);
    SDSV_CHECK(!vals.empty(), "embedding line with no values: " + line);
    Vector e(static_cast<Eigen::Index>(vals.size()));
    for (std::size_t i = 0; i < vals.size(); ++i)
      e(static_cast<Eigen::Index>(i)) = vals[i];
    out.emplace_back(id, std::move(e));
  }
  return out;
}

std::vector<Trial> read_trials(const std::string& path) {
  auto is = open_in(path);
  std::vector<Trial> out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    Trial t;
    std::string lab;
    SDSV_CHECK(static_cast<bool>(ss >> t.enroll_id >> t.test_id),
               "bad trial line: " + line);
    if (ss >> lab) {
      SDSV_CHECK(lab == "target" || lab == "nontarget",
                 "bad trial label: " + lab);
      t.label = (lab == "target") ? 1 : 0;
    }
    out.push_back(std::move(t));
  }
  return out;
}

void write_trials(const std::string& path, const std::vector<Trial>& trials) {
  auto os = open_out(path);
  for (const auto& t : trials) {
    os << t.enroll_id << ' ' << t.test_id;
    if (t.label == 1) os << " target";
    else if (t.label == 0) os << " nontarget";
    os << '\n';
  }
}

std::vector<ScoredTrial> read_scores(const std::string& path) {
  auto is = open_in(path);
  std::vector<ScoredTrial> out;
  ScoredTrial s;
  while (is >> s.enroll_id >> s.test_id >> s.score) out.push_back(s);
  return out;
}

void write_scores(const std::string& path,
                  const std::vector<ScoredTrial>& scores) {
  auto os = open_out(path);
  for (const auto& s : scores)
    os << s.enroll_id << ' ' << s.test_id << ' ' << format_double(s.score)
       << '\n';
}

void write_pseudo_labels(const std::string& path,
                         const std::vector<std::pair<std::string, int>>& rows) {
  auto os = open_out(path);
  for (const auto& [id, lab] : rows) os << id << ' ' << lab << '\n';
}

std::vector<std::pair<std::string, int>> read_pseudo_labels(
    const std::string& path) {
  auto is = open_in(path);
  std::vector<std::pair<std::string, int>> out;
  std::string id;
  int lab;
  while (is >> id >> lab) out.emplace_back(id, lab);
  return out;
}

}  // namespace sdsv

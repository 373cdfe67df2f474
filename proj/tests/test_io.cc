// tests/test_io.cc

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

#include <cstdio>
#include <filesystem>
#include <string>

#include "sdsv/checkpoint.hh"
#include "sdsv/nn.hh"
#include "sdsv/rng.hh"
#include "sdsv/textio.hh"
#include "sdsv/wav.hh"
#include "test_helpers.hh"

using namespace sdsv;

namespace {

std::string tmp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("format_double: 17 significant digits round-trip") {
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const double v = rng.gaussian() * std::pow(10.0, rng.uniform(-20, 20));
    CHECK(std::stod(format_double(v)) == v);
  }
  CHECK(std::stod(format_double(0.1)) == 0.1);
}

TEST_CASE("wav: write/read round trip is sample-exact") {
  Waveform w;
  w.sample_rate = 16000;
  Rng rng(2);
  for (int i = 0; i < 5000; ++i)
    w.samples.push_back(std::floor(rng.uniform(-1.0, 1.0) * 32768.0) /
                        32768.0);
  const std::string p = tmp_path("sdsv_test.wav");
  write_wav(p, w);
  const Waveform r = read_wav(p);
  CHECK(r.sample_rate == 16000);
  REQUIRE(r.samples.size() == w.samples.size());
  for (std::size_t i = 0; i < w.samples.size(); ++i)
    CHECK(r.samples[i] == doctest::Approx(w.samples[i]).epsilon(1e-12));
  std::remove(p.c_str());
}

TEST_CASE("manifest round trip") {
  const std::string p = tmp_path("sdsv_manifest.txt");
  std::vector<ManifestEntry> entries = {
      {"u1", "spk1", 0, "wav/u1.wav"},
      {"u2", "spk2", 3, "/abs/u2.wav"},
  };
  write_manifest(p, entries);
  const auto got = read_manifest(p);
  REQUIRE(got.size() == 2);
  CHECK(got[0].utt_id == "u1");
  CHECK(got[1].speaker_id == "spk2");
  CHECK(got[1].attr_class == 3);
  CHECK(got[1].path == "/abs/u2.wav");
  std::remove(p.c_str());
}

TEST_CASE("feature archive round trip is bit-exact") {
  Rng rng(3);
  std::vector<std::pair<std::string, FeatureMatrix>> recs;
  recs.emplace_back("a", test::random_features(7, 4, rng));
  recs.emplace_back("b", test::random_features(1, 4, rng));
  const std::string p = tmp_path("sdsv_feats.txt");
  write_feature_archive(p, recs);
  const auto got = read_feature_archive(p);
  REQUIRE(got.size() == 2);
  CHECK(got[0].first == "a");
  CHECK((got[0].second.frames - recs[0].second.frames).cwiseAbs().maxCoeff() ==
        0.0);
  CHECK((got[1].second.frames - recs[1].second.frames).cwiseAbs().maxCoeff() ==
        0.0);
  std::remove(p.c_str());
}

TEST_CASE("embeddings, trials, scores, pseudo labels round trip") {
  Rng rng(4);
  const std::string pe = tmp_path("sdsv_emb.txt");
  std::vector<std::pair<std::string, Vector>> embs;
  embs.emplace_back("u1", test::random_vector(8, rng));
  write_embeddings(pe, embs);
  auto ge = read_embeddings(pe);
  REQUIRE(ge.size() == 1);
  CHECK(test::max_abs_diff(ge[0].second, embs[0].second) == 0.0);
  std::remove(pe.c_str());

  const std::string pt = tmp_path("sdsv_trials.txt");
  write_trials(pt, {{"a", "b", 1}, {"a", "c", 0}, {"b", "c", -1}});
  auto gt = read_trials(pt);
  REQUIRE(gt.size() == 3);
  CHECK(gt[0].label == 1);
  CHECK(gt[1].label == 0);
  CHECK(gt[2].label == -1);
  std::remove(pt.c_str());

  const std::string ps = tmp_path("sdsv_scores.txt");
  write_scores(ps, {{"a", "b", -1.25}});
  auto gs = read_scores(ps);
  REQUIRE(gs.size() == 1);
  CHECK(gs[0].score == -1.25);
  std::remove(ps.c_str());

  const std::string pp = tmp_path("sdsv_pl.txt");
  write_pseudo_labels(pp, {{"u1", 3}, {"u2", 0}});
  auto gp = read_pseudo_labels(pp);
  REQUIRE(gp.size() == 2);
  CHECK(gp[0].second == 3);
  std::remove(pp.c_str());
}

TEST_CASE("checkpoint: bit-exact round trip with named blocks") {
  Rng rng(5);
  EncoderConfig cfg;
  cfg.input_dim = 6;
  cfg.hidden_dims = {5};
  cfg.embedding_dim = 4;
  Rng init(6);
  EncoderParams p = EncoderParams::init(cfg, init);
  const std::string path = tmp_path("sdsv_ckpt.txt");
  save_checkpoint(path, "12345", p.param_refs());

  EncoderParams q = p.zeros_like();
  q.cfg = cfg;
  auto refs = q.param_refs();
  const std::string hash = load_checkpoint(path, refs);
  CHECK(hash == "12345");
  auto pr = p.param_refs();
  CHECK(test::bitwise_equal(pr, refs));
  CHECK(checkpoint_config_hash(path) == "12345");

  // Generic reader sees the same contents.
  const CheckpointFile f = read_checkpoint(path);
  CHECK(f.config_hash == "12345");
  CHECK(f.has("enc.w0"));
  CHECK((f.at("enc.w0") - p.w[0]).cwiseAbs().maxCoeff() == 0.0);
  CHECK((f.at("enc.b_emb").col(0) - p.b_emb).cwiseAbs().maxCoeff() == 0.0);
  std::remove(path.c_str());
}

TEST_CASE("checkpoint: name mismatch is rejected") {
  Rng init(7);
  EncoderConfig cfg;
  cfg.input_dim = 3;
  cfg.hidden_dims = {3};
  cfg.embedding_dim = 2;
  EncoderParams p = EncoderParams::init(cfg, init);
  const std::string path = tmp_path("sdsv_ckpt2.txt");
  auto refs = p.param_refs();
  save_checkpoint(path, "0", refs);
  refs[0].name = "wrong";
  CHECK_THROWS_AS(load_checkpoint(path, refs), InputError);
  std::remove(path.c_str());
}

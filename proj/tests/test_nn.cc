// tests/test_nn.cc

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
#include <limits>
#include <vector>

#include "sdsv/nn.hh"
#include "sdsv/rng.hh"
#include "test_helpers.hh"

using namespace sdsv;

namespace {

// Identity network: one hidden layer carrying the (non-negative) input
// through unchanged, embedding = pooled mean.
EncoderParams identity_encoder(int dim) {
  EncoderConfig cfg;
  cfg.input_dim = dim;
  cfg.hidden_dims = {dim};
  cfg.embedding_dim = dim;
  Rng rng(0);
  EncoderParams p = EncoderParams::init(cfg, rng);
  p.w[0] = Matrix::Identity(dim, dim);
  p.b[0].setZero();
  p.w_emb = Matrix::Zero(dim, 2 * dim);
  p.w_emb.leftCols(dim) = Matrix::Identity(dim, dim);
  p.b_emb.setZero();
  return p;
}

FeatureMatrix abs_features(int t, int d, std::uint64_t seed) {
  Rng rng(seed);
  FeatureMatrix f = test::random_features(t, d, rng);
  f.frames = f.frames.cwiseAbs();
  return f;
}

}  // namespace

TEST_CASE("encoder: single frame pools to floored stddev") {
  Rng rng(1);
  EncoderConfig cfg;
  cfg.input_dim = 6;
  cfg.hidden_dims = {8};
  cfg.embedding_dim = 4;
  EncoderParams p = EncoderParams::init(cfg, rng);
  EncoderCache cache;
  encoder_forward(p, test::random_features(1, 6, rng), &cache);
  for (Eigen::Index d = 0; d < cache.stddev.size(); ++d)
    CHECK(cache.stddev(d) == doctest::Approx(1e-4).epsilon(1e-9));
}

TEST_CASE("encoder: identity stack recovers the frame mean") {
  const FeatureMatrix f = abs_features(9, 5, 2);
  EncoderParams p = identity_encoder(5);
  const Vector e = encoder_forward(p, f, nullptr);
  const Vector want = f.frames.colwise().mean().transpose();
  CHECK(test::max_abs_diff(e, want) < 1e-12);
}

TEST_CASE("encoder: pooled stats match a direct computation on 5 frames") {
  const FeatureMatrix f = abs_features(5, 3, 3);
  EncoderParams p = identity_encoder(3);
  EncoderCache cache;
  encoder_forward(p, f, &cache);
  for (int d = 0; d < 3; ++d) {
    double mean = 0.0;
    for (int t = 0; t < 5; ++t) mean += f.frames(t, d);
    mean /= 5.0;
    double var = 0.0;
    for (int t = 0; t < 5; ++t)
      var += (f.frames(t, d) - mean) * (f.frames(t, d) - mean);
    var /= 5.0;  // population variance
    CHECK(std::abs(cache.mean(d) - mean) < 1e-12);
    CHECK(std::abs(cache.stddev(d) - std::sqrt(var + 1e-8)) < 1e-12);
  }
}

TEST_CASE("encoder: zero output gradient gives zero parameter gradients") {
  Rng rng(4);
  EncoderConfig cfg;
  cfg.input_dim = 4;
  cfg.hidden_dims = {6, 5};
  cfg.embedding_dim = 3;
  EncoderParams p = EncoderParams::init(cfg, rng);
  EncoderCache cache;
  encoder_forward(p, test::random_features(7, 4, rng), &cache);
  EncoderParams g = p.zeros_like();
  encoder_backward(p, cache, Vector::Zero(3), g);
  CHECK(flatten(g.param_refs()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("encoder: analytic gradients agree with finite differences") {
  Rng rng(5);
  struct Shape {
    int in, emb, t;
    std::vector<int> hidden;
  };
  const std::vector<Shape> shapes = {
      {4, 3, 6, {5}}, {6, 4, 9, {7, 5}}, {3, 5, 4, {8}}};
  for (const auto& s : shapes) {
    EncoderConfig cfg;
    cfg.input_dim = s.in;
    cfg.hidden_dims = s.hidden;
    cfg.embedding_dim = s.emb;
    EncoderParams p = EncoderParams::init(cfg, rng);
    const FeatureMatrix f = test::random_features(s.t, s.in, rng);
    const Vector c = test::random_vector(s.emb, rng);

    // L = 0.5 ||e||^2 + c . e  =>  dL/de = e + c
    auto loss = [&]() {
      const Vector e = encoder_forward(p, f, nullptr);
      return 0.5 * e.squaredNorm() + c.dot(e);
    };
    EncoderCache cache;
    const Vector e = encoder_forward(p, f, &cache);
    EncoderParams g = p.zeros_like();
    encoder_backward(p, cache, Vector(e + c), g);
    auto refs = p.param_refs();
    CHECK(grad_check(refs, loss, flatten(g.param_refs())) < 1e-4);
  }
}

TEST_CASE("encoder: duplicating every frame leaves the embedding unchanged") {
  Rng rng(6);
  EncoderConfig cfg;
  cfg.input_dim = 5;
  cfg.hidden_dims = {7};
  cfg.embedding_dim = 4;
  EncoderParams p = EncoderParams::init(cfg, rng);
  const FeatureMatrix f = test::random_features(11, 5, rng);
  FeatureMatrix doubled;
  doubled.frames.resize(22, 5);
  for (int t = 0; t < 11; ++t) {
    doubled.frames.row(2 * t) = f.frames.row(t);
    doubled.frames.row(2 * t + 1) = f.frames.row(t);
  }
  CHECK(test::max_abs_diff(encoder_forward(p, f, nullptr),
                           encoder_forward(p, doubled, nullptr)) < 1e-9);
}

TEST_CASE("encoder: frame order does not matter") {
  Rng rng(7);
  EncoderConfig cfg;
  cfg.input_dim = 4;
  cfg.hidden_dims = {6};
  cfg.embedding_dim = 3;
  EncoderParams p = EncoderParams::init(cfg, rng);
  const FeatureMatrix f = test::random_features(13, 4, rng);
  FeatureMatrix rev;
  rev.frames = f.frames.colwise().reverse();
  CHECK(test::max_abs_diff(encoder_forward(p, f, nullptr),
                           encoder_forward(p, rev, nullptr)) < 1e-12);
}

TEST_CASE("head: logits invariant to input scale through the l2 bottleneck") {
  HeadConfig cfg;
  cfg.input_dim = 6;
  cfg.hidden_dims = {};  // keep the pre-bottleneck path linear
  cfg.bottleneck_dim = 4;
  cfg.out_dim = 10;
  Rng rng(8);
  HeadParams p = HeadParams::init(cfg, rng);
  p.b_bot.setZero();
  const Vector x = test::random_vector(6, rng);
  const Vector l1 = head_forward(p, x, nullptr);
  const Vector l10 = head_forward(p, Vector(10.0 * x), nullptr);
  CHECK(test::max_abs_diff(l1, l10) < 1e-12);
  for (Eigen::Index k = 0; k < l1.size(); ++k) {
    CHECK(l1(k) <= 1.0 + 1e-12);  // cosine of two unit vectors
    CHECK(l1(k) >= -1.0 - 1e-12);
  }
}

TEST_CASE("head: identity basis rows read out the unit bottleneck") {
  HeadConfig cfg;
  cfg.input_dim = 4;
  cfg.hidden_dims = {};
  cfg.bottleneck_dim = 4;
  cfg.out_dim = 4;
  Rng rng(9);
  HeadParams p = HeadParams::init(cfg, rng);
  p.w_bot = Matrix::Identity(4, 4);
  p.b_bot.setZero();
  p.v_dir = Matrix::Identity(4, 4);
  const Vector x = test::random_vector(4, rng);
  HeadCache cache;
  const Vector logits = head_forward(p, x, &cache);
  CHECK(test::max_abs_diff(logits, cache.unit_bottleneck) < 1e-12);
  CHECK(test::max_abs_diff(cache.unit_bottleneck, Vector(x / x.norm())) <
        1e-12);
}

TEST_CASE("head: analytic gradients agree with finite differences") {
  HeadConfig cfg;
  cfg.input_dim = 5;
  cfg.hidden_dims = {6, 4};
  cfg.bottleneck_dim = 3;
  cfg.out_dim = 7;
  Rng rng(10);
  HeadParams p = HeadParams::init(cfg, rng);
  const Vector x = test::random_vector(5, rng);
  const Vector c = test::random_vector(7, rng);

  auto loss = [&]() {
    const Vector l = head_forward(p, x, nullptr);
    return 0.5 * l.squaredNorm() + c.dot(l);
  };
  HeadCache cache;
  const Vector l = head_forward(p, x, &cache);
  HeadParams g = p.zeros_like();
  const Vector g_in = head_backward(p, cache, Vector(l + c), g);
  auto refs = p.param_refs();
  CHECK(grad_check(refs, loss, flatten(g.param_refs())) < 1e-4);

  // input gradient against finite differences too
  Vector x_mut = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = 1e-5;
    Vector xp = x, xm = x;
    xp(i) += h;
    xm(i) -= h;
    auto eval = [&](const Vector& xx) {
      const Vector ll = head_forward(p, xx, nullptr);
      return 0.5 * ll.squaredNorm() + c.dot(ll);
    };
    const double numeric = (eval(xp) - eval(xm)) / (2.0 * h);
    CHECK(std::abs(numeric - g_in(i)) /
              std::max(1e-8, std::abs(numeric) + std::abs(g_in(i))) <
          1e-4);
  }
}

TEST_CASE("head: renormalize_rows makes v_dir rows unit length") {
  HeadConfig cfg;
  cfg.input_dim = 4;
  cfg.hidden_dims = {5};
  cfg.bottleneck_dim = 3;
  cfg.out_dim = 6;
  Rng rng(11);
  HeadParams p = HeadParams::init(cfg, rng);
  p.v_dir *= 3.7;
  p.renormalize_rows();
  for (Eigen::Index k = 0; k < p.v_dir.rows(); ++k)
    CHECK(std::abs(p.v_dir.row(k).norm() - 1.0) < 1e-12);
}

TEST_CASE("adam: zero gradients and no decay leave parameters unchanged") {
  Rng rng(12);
  EncoderConfig cfg;
  cfg.input_dim = 3;
  cfg.hidden_dims = {4};
  cfg.embedding_dim = 2;
  EncoderParams p = EncoderParams::init(cfg, rng);
  EncoderParams before = p;
  EncoderParams g = p.zeros_like();
  auto refs = p.param_refs();
  AdamState st = AdamState::init(total_size(refs));
  AdamConfig acfg;
  acfg.weight_decay = 0.0;
  adam_step(refs, g.param_refs(), st, acfg, 0.01);
  CHECK(test::bitwise_equal(refs, before.param_refs()));
}

TEST_CASE("adam: first-step magnitude is the learning rate") {
  Rng rng(13);
  EncoderConfig cfg;
  cfg.input_dim = 3;
  cfg.hidden_dims = {4};
  cfg.embedding_dim = 2;
  EncoderParams p = EncoderParams::init(cfg, rng);
  EncoderParams before = p;
  EncoderParams g = p.zeros_like();
  // constant-magnitude gradient: |update| = lr * |g| / (|g| + eps) ~ lr
  Vector gv = Vector::Constant(total_size(p.param_refs()), 0.0);
  for (Eigen::Index i = 0; i < gv.size(); ++i) gv(i) = (i % 2) ? 2.0 : -2.0;
  auto grefs = g.param_refs();
  unflatten(gv, grefs);
  auto refs = p.param_refs();
  AdamState st = AdamState::init(gv.size());
  AdamConfig acfg;
  acfg.weight_decay = 0.0;
  adam_step(refs, grefs, st, acfg, 0.01);
  const Vector delta = flatten(before.param_refs()) - flatten(refs);
  for (Eigen::Index i = 0; i < delta.size(); ++i) {
    CHECK(std::abs(std::abs(delta(i)) / 0.01 - 1.0) < 1e-7);
    CHECK(delta(i) * gv(i) > 0.0);  // moves against the gradient
  }
}

TEST_CASE("adam: amsgrad steps are never larger than plain adam's") {
  Rng rng(14);
  const Eigen::Index n = 40;
  Vector pa = test::random_vector(n, rng), pb = pa;
  std::vector<ParamRef> ra = {{"p", pa.data(), n, 1}};
  std::vector<ParamRef> rb = {{"p", pb.data(), n, 1}};
  AdamState sa = AdamState::init(n), sb = AdamState::init(n);
  AdamConfig ca, cb;
  ca.amsgrad = true;
  cb.amsgrad = false;
  ca.weight_decay = cb.weight_decay = 0.0;
  for (int step = 0; step < 30; ++step) {
    Vector g = test::random_vector(n, rng, step < 5 ? 5.0 : 0.1);
    Vector ga = g, gb = g;
    std::vector<ParamRef> gra = {{"p", ga.data(), n, 1}};
    std::vector<ParamRef> grb = {{"p", gb.data(), n, 1}};
    const Vector before_a = pa, before_b = pb;
    adam_step(ra, gra, sa, ca, 0.01);
    adam_step(rb, grb, sb, cb, 0.01);
    for (Eigen::Index i = 0; i < n; ++i)
      CHECK(std::abs(pa(i) - before_a(i)) <=
            std::abs(pb(i) - before_b(i)) + 1e-12);
  }
}

TEST_CASE("adam: non-finite gradients raise DivergedError") {
  Vector p = Vector::Ones(3), g = Vector::Ones(3);
  g(1) = std::numeric_limits<double>::quiet_NaN();
  std::vector<ParamRef> rp = {{"p", p.data(), 3, 1}};
  std::vector<ParamRef> rg = {{"p", g.data(), 3, 1}};
  AdamState st = AdamState::init(3);
  AdamConfig cfg;
  CHECK_THROWS_AS(adam_step(rp, rg, st, cfg, 0.01), DivergedError);
  g(1) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(adam_step(rp, rg, st, cfg, 0.01), DivergedError);
}

TEST_CASE("adam: frozen blocks stay bit-identical across steps") {
  Rng rng(15);
  EncoderConfig cfg;
  cfg.input_dim = 3;
  cfg.hidden_dims = {4};
  cfg.embedding_dim = 2;
  EncoderParams p = EncoderParams::init(cfg, rng);
  const Matrix w0_before = p.w[0];
  const Vector b0_before = p.b[0];
  auto refs = p.param_refs();
  std::vector<bool> frozen(refs.size(), false);
  frozen[0] = frozen[1] = true;  // w0, b0
  AdamState st = AdamState::init(total_size(refs));
  AdamConfig acfg;  // weight decay on: frozen blocks must still not move
  for (int step = 0; step < 5; ++step) {
    EncoderParams g = p.zeros_like();
    Vector gv = test::random_vector(total_size(refs), rng);
    auto grefs = g.param_refs();
    unflatten(gv, grefs);
    adam_step(refs, grefs, st, acfg, 0.05, &frozen);
  }
  CHECK((p.w[0].array() == w0_before.array()).all());
  CHECK((p.b[0].array() == b0_before.array()).all());
  // unfrozen blocks did move
  CHECK(flatten(refs).tail(p.b_emb.size()).size() > 0);
  bool moved = false;
  for (Eigen::Index i = 0; i < p.w_emb.size(); ++i)
    if (p.w_emb.data()[i] != 0.0) moved = true;
  CHECK(moved);
}

TEST_CASE("grad_check: quadratic loss is exact to first order") {
  Rng rng(16);
  Vector x = test::random_vector(20, rng);
  const Vector a = test::random_vector(20, rng);
  std::vector<ParamRef> refs = {{"x", x.data(), 20, 1}};
  auto loss = [&]() { return 0.5 * (x - a).squaredNorm(); };
  // limited by cancellation in the central difference, not by the math
  CHECK(grad_check(refs, loss, Vector(x - a)) < 1e-8);
}

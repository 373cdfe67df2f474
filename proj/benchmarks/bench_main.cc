// benchmarks/bench_main.cc

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

// Microbenchmarks for the per-step hot paths: feature extraction, encoder
// forward/backward, the two losses, back-end scoring, and clustering.

#include <benchmark/benchmark.h>

#include <complex>
#include <vector>

#include "sdsv/backend.hh"
#include "sdsv/cluster.hh"
#include "sdsv/dino.hh"
#include "sdsv/eval.hh"
#include "sdsv/features.hh"
#include "sdsv/fft.hh"
#include "sdsv/nn.hh"
#include "sdsv/rng.hh"
#include "sdsv/supervised.hh"

using namespace sdsv;

namespace {

Waveform noise_wave(double seconds, std::uint64_t seed) {
  Waveform w;
  w.samples.resize(static_cast<std::size_t>(seconds * w.sample_rate));
  Rng rng(seed);
  for (auto& s : w.samples) s = 0.1 * rng.gaussian();
  return w;
}

FeatureMatrix random_features(int t, int d, std::uint64_t seed) {
  FeatureMatrix f;
  f.frames.resize(t, d);
  Rng rng(seed);
  for (int i = 0; i < t; ++i)
    for (int j = 0; j < d; ++j) f.frames(i, j) = rng.gaussian();
  return f;
}

}  // namespace

static void BM_Fft512(benchmark::State& state) {
  Rng rng(1);
  std::vector<std::complex<double>> x(512);
  for (auto& v : x) v = {rng.gaussian(), 0.0};
  for (auto _ : state) {
    auto y = x;
    fft(y);
    benchmark::DoNotOptimize(y);
  }
}
BENCHMARK(BM_Fft512);

static void BM_Logmel4s(benchmark::State& state) {
  const Waveform w = noise_wave(4.0, 2);
  FeatureConfig cfg;
  for (auto _ : state) {
    FeatureMatrix f = logmel(w, cfg);
    benchmark::DoNotOptimize(f.frames);
  }
}
BENCHMARK(BM_Logmel4s);

static void BM_EnergyVad4s(benchmark::State& state) {
  const Waveform w = noise_wave(4.0, 3);
  FeatureConfig cfg;
  for (auto _ : state) {
    auto keep = energy_vad(w, cfg);
    benchmark::DoNotOptimize(keep);
  }
}
BENCHMARK(BM_EnergyVad4s);

static void BM_SlidingMvn(benchmark::State& state) {
  const FeatureMatrix f = random_features(400, 24, 4);
  for (auto _ : state) {
    FeatureMatrix g = sliding_mvn(f, 150);
    benchmark::DoNotOptimize(g.frames);
  }
}
BENCHMARK(BM_SlidingMvn);

static void BM_EncoderForward(benchmark::State& state) {
  EncoderConfig cfg;
  cfg.hidden_dims = {static_cast<int>(state.range(0))};
  Rng rng(5);
  const EncoderParams p = EncoderParams::init(cfg, rng);
  const FeatureMatrix f = random_features(400, cfg.input_dim, 6);
  for (auto _ : state) {
    Vector e = encoder_forward(p, f, nullptr);
    benchmark::DoNotOptimize(e);
  }
}
BENCHMARK(BM_EncoderForward)->Arg(64)->Arg(128);

static void BM_EncoderBackward(benchmark::State& state) {
  EncoderConfig cfg;
  Rng rng(7);
  const EncoderParams p = EncoderParams::init(cfg, rng);
  const FeatureMatrix f = random_features(400, cfg.input_dim, 8);
  EncoderCache cache;
  const Vector e = encoder_forward(p, f, &cache);
  const Vector g = Vector::Ones(e.size());
  for (auto _ : state) {
    EncoderParams grads = p.zeros_like();
    encoder_backward(p, cache, g, grads);
    benchmark::DoNotOptimize(grads.w_emb);
  }
}
BENCHMARK(BM_EncoderBackward);

static void BM_HeadForward(benchmark::State& state) {
  HeadConfig cfg;
  Rng rng(9);
  const HeadParams p = HeadParams::init(cfg, rng);
  Vector e(cfg.input_dim);
  for (int i = 0; i < e.size(); ++i) e(i) = rng.gaussian();
  for (auto _ : state) {
    Vector logits = head_forward(p, e, nullptr);
    benchmark::DoNotOptimize(logits);
  }
}
BENCHMARK(BM_HeadForward);

static void BM_DinoLoss(benchmark::State& state) {
  Rng rng(11);
  const int k = 256;
  std::vector<Vector> teacher, student;
  for (int i = 0; i < 2; ++i) {
    Vector l(k);
    for (int j = 0; j < k; ++j) l(j) = rng.gaussian();
    teacher.push_back(temp_softmax(l, 0.04));
  }
  for (int i = 0; i < 6; ++i) {
    Vector l(k);
    for (int j = 0; j < k; ++j) l(j) = rng.gaussian();
    student.push_back(l);
  }
  std::vector<Vector> grads;
  for (auto _ : state) {
    double loss = dino_loss(teacher, student, 0.1, &grads);
    benchmark::DoNotOptimize(loss);
  }
}
BENCHMARK(BM_DinoLoss);

static void BM_AamLoss(benchmark::State& state) {
  Rng rng(13);
  const int n = 16, d = 32, c = 50;
  Matrix e(n, d), w(c, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) e(i, j) = rng.gaussian();
  for (int i = 0; i < c; ++i)
    for (int j = 0; j < d; ++j) w(i, j) = rng.gaussian();
  std::vector<int> y(n);
  for (int i = 0; i < n; ++i) y[i] = static_cast<int>(rng.uniform_int(c));
  Matrix ge, gw;
  for (auto _ : state) {
    double loss = aam_loss(e, y, w, 30.0, 0.3, &ge, &gw);
    benchmark::DoNotOptimize(loss);
  }
}
BENCHMARK(BM_AamLoss);

static void BM_PldaLlr(benchmark::State& state) {
  Rng rng(15);
  const int d = 32, q = 8;
  PLDAModel m;
  m.mu = Vector::Zero(d);
  m.v.resize(d, q);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < q; ++j) m.v(i, j) = 0.3 * rng.gaussian();
  m.sw = Matrix::Identity(d, d) * 0.2;
  const PLDAScorer scorer = make_plda_scorer(m);
  Vector a(d), b(d);
  for (int i = 0; i < d; ++i) {
    a(i) = rng.gaussian();
    b(i) = rng.gaussian();
  }
  for (auto _ : state) {
    double s = plda_llr(scorer, a, b);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_PldaLlr);

static void BM_CosineScore(benchmark::State& state) {
  Rng rng(17);
  Vector a(32), b(32);
  for (int i = 0; i < 32; ++i) {
    a(i) = rng.gaussian();
    b(i) = rng.gaussian();
  }
  for (auto _ : state) {
    double s = cosine_score(a, b);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_CosineScore);

static void BM_Kmeans(benchmark::State& state) {
  Rng rng(19);
  Matrix x(400, 16);
  for (int i = 0; i < x.rows(); ++i)
    for (int j = 0; j < x.cols(); ++j) x(i, j) = rng.gaussian();
  for (auto _ : state) {
    KMeansResult r = kmeans(x, 20, 50, 21);
    benchmark::DoNotOptimize(r.inertia);
  }
}
BENCHMARK(BM_Kmeans);

static void BM_Eer(benchmark::State& state) {
  Rng rng(23);
  std::vector<double> tgt, non;
  for (int i = 0; i < 2000; ++i) {
    tgt.push_back(rng.gaussian() + 1.0);
    non.push_back(rng.gaussian());
  }
  for (auto _ : state) {
    double e = eer(tgt, non);
    benchmark::DoNotOptimize(e);
  }
}
BENCHMARK(BM_Eer);

BENCHMARK_MAIN();

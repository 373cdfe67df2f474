// core/nn.cc

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

#include "sdsv/nn.hh"

#include <cmath>

namespace sdsv {

namespace {

constexpr double kVarFloor = 1e-8;
constexpr double kNormFloor = 1e-12;

Matrix he_init(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Matrix m(rows, cols);
  const double scale = std::sqrt(2.0 / static_cast<double>(cols));
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = scale * rng.gaussian();
  return m;
}

}  // namespace

Eigen::Index total_size(const std::vector<ParamRef>& refs) {
  Eigen::Index n = 0;
  for (const auto& r : refs) n += r.size();
  return n;
}

Vector flatten(const std::vector<ParamRef>& refs) {
  Vector out(total_size(refs));
  Eigen::Index off = 0;
  for (const auto& r : refs) {
    out.segment(off, r.size()) = Eigen::Map<const Vector>(r.data, r.size());
    off += r.size();
  }
  return out;
}

void unflatten(const Vector& flat, std::vector<ParamRef>& refs) {
  SDSV_CHECK(flat.size() == total_size(refs), "size mismatch in unflatten");
  Eigen::Index off = 0;
  for (auto& r : refs) {
    Eigen::Map<Vector>(r.data, r.size()) = flat.segment(off, r.size());
    off += r.size();
  }
}

// ---------------------------------------------------------------------------
// Encoder

EncoderParams EncoderParams::init(const EncoderConfig& cfg, Rng& rng) {
  SDSV_CHECK(!cfg.hidden_dims.empty(), "encoder needs >= 1 hidden layer");
  EncoderParams p;
  p.cfg = cfg;
  int prev = cfg.input_dim;
  for (int h : cfg.hidden_dims) {
    p.w.push_back(he_init(h, prev, rng));
    p.b.push_back(Vector::Zero(h));
    prev = h;
  }
  p.w_emb = he_init(cfg.embedding_dim, 2 * prev, rng);
  p.b_emb = Vector::Zero(cfg.embedding_dim);
  return p;
}

EncoderParams EncoderParams::zeros_like() const {
  EncoderParams g;
  g.cfg = cfg;
  for (const auto& m : w) g.w.push_back(Matrix::Zero(m.rows(), m.cols()));
  for (const auto& v : b) g.b.push_back(Vector::Zero(v.size()));
  g.w_emb = Matrix::Zero(w_emb.rows(), w_emb.cols());
  g.b_emb = Vector::Zero(b_emb.size());
  return g;
}

std::vector<ParamRef> EncoderParams::param_refs() {
  std::vector<ParamRef> refs;
  for (std::size_t i = 0; i < w.size(); ++i) {
    refs.push_back({"enc.w" + std::to_string(i), w[i].data(), w[i].rows(),
                    w[i].cols()});
    refs.push_back({"enc.b" + std::to_string(i), b[i].data(), b[i].size(), 1});
  }
  refs.push_back({"enc.w_emb", w_emb.data(), w_emb.rows(), w_emb.cols()});
  refs.push_back({"enc.b_emb", b_emb.data(), b_emb.size(), 1});
  return refs;
}

Vector encoder_forward(const EncoderParams& p, const FeatureMatrix& f,
                       EncoderCache* cache) {
  const Eigen::Index T = f.frames.rows();
  SDSV_CHECK(T >= 1, "empty feature matrix");
  SDSV_CHECK(f.frames.cols() == p.cfg.input_dim,
             "input dim mismatch in encoder_forward");

  Matrix h = f.frames;
  std::vector<Matrix> hidden;
  for (std::size_t i = 0; i < p.w.size(); ++i) {
    Matrix z = h * p.w[i].transpose();
    z.rowwise() += p.b[i].transpose();
    h = z.cwiseMax(0.0);
    hidden.push_back(h);
  }

  Vector mean = h.colwise().mean();
  Vector var = (h.rowwise() - mean.transpose())
                   .array()
                   .square()
                   .colwise()
                   .sum()
                   .transpose() /
               static_cast<double>(T);
  Vector stddev = (var.array() + kVarFloor).sqrt();

  Vector pooled(2 * mean.size());
  pooled << mean, stddev;
  Vector e = p.w_emb * pooled + p.b_emb;

  if (cache) {
    cache->input = f.frames;
    cache->hidden = std::move(hidden);
    cache->mean = std::move(mean);
    cache->stddev = std::move(stddev);
    cache->pooled = std::move(pooled);
  }
  return e;
}

void encoder_backward(const EncoderParams& p, const EncoderCache& cache,
                      const Vector& grad_embedding, EncoderParams& grads) {
  const Eigen::Index T = cache.input.rows();
  const Eigen::Index hdim = cache.mean.size();

  grads.w_emb += grad_embedding * cache.pooled.transpose();
  grads.b_emb += grad_embedding;

  Vector g_pooled = p.w_emb.transpose() * grad_embedding;
  Vector g_mean = g_pooled.head(hdim);
  Vector g_std = g_pooled.tail(hdim);

  // d mean_d / d x_td = 1/T
  // d std_d  / d x_td = (x_td - mean_d) / (T * std_d)
  const Matrix& top = cache.hidden.back();
  Matrix g_h(T, hdim);
  for (Eigen::Index t = 0; t < T; ++t)
    for (Eigen::Index d = 0; d < hdim; ++d)
      g_h(t, d) = g_mean(d) / static_cast<double>(T) +
                  g_std(d) * (top(t, d) - cache.mean(d)) /
                      (static_cast<double>(T) * cache.stddev(d));

  for (int i = static_cast<int>(p.w.size()) - 1; i >= 0; --i) {
    // ReLU mask from the cached post-activation.
    Matrix g_z =
        ((cache.hidden[i].array() > 0.0).cast<double>() * g_h.array())
            .matrix();
    const Matrix& below =
        (i == 0) ? cache.input : cache.hidden[static_cast<std::size_t>(i - 1)];
    grads.w[i] += g_z.transpose() * below;
    grads.b[i] += g_z.colwise().sum().transpose();
    if (i > 0) g_h = g_z * p.w[i];
  }
}

// ---------------------------------------------------------------------------
// Head

HeadParams HeadParams::init(const HeadConfig& cfg, Rng& rng) {
  HeadParams p;
  p.cfg = cfg;
  int prev = cfg.input_dim;
  for (int h : cfg.hidden_dims) {
    p.w.push_back(he_init(h, prev, rng));
    p.b.push_back(Vector::Zero(h));
    prev = h;
  }
  p.w_bot = he_init(cfg.bottleneck_dim, prev, rng);
  p.b_bot = Vector::Zero(cfg.bottleneck_dim);
  p.v_dir = he_init(cfg.out_dim, cfg.bottleneck_dim, rng);
  p.renormalize_rows();
  return p;
}

HeadParams HeadParams::zeros_like() const {
  HeadParams g;
  g.cfg = cfg;
  for (const auto& m : w) g.w.push_back(Matrix::Zero(m.rows(), m.cols()));
  for (const auto& v : b) g.b.push_back(Vector::Zero(v.size()));
  g.w_bot = Matrix::Zero(w_bot.rows(), w_bot.cols());
  g.b_bot = Vector::Zero(b_bot.size());
  g.v_dir = Matrix::Zero(v_dir.rows(), v_dir.cols());
  return g;
}

std::vector<ParamRef> HeadParams::param_refs() {
  std::vector<ParamRef> refs;
  for (std::size_t i = 0; i < w.size(); ++i) {
    refs.push_back({"head.w" + std::to_string(i), w[i].data(), w[i].rows(),
                    w[i].cols()});
    refs.push_back(
        {"head.b" + std::to_string(i), b[i].data(), b[i].size(), 1});
  }
  refs.push_back({"head.w_bot", w_bot.data(), w_bot.rows(), w_bot.cols()});
  refs.push_back({"head.b_bot", b_bot.data(), b_bot.size(), 1});
  refs.push_back({"head.v_dir", v_dir.data(), v_dir.rows(), v_dir.cols()});
  return refs;
}

void HeadParams::renormalize_rows() {
  for (Eigen::Index k = 0; k < v_dir.rows(); ++k) {
    const double n = v_dir.row(k).norm();
    if (n > kNormFloor) v_dir.row(k) /= n;
  }
}

Vector head_forward(const HeadParams& p, const Vector& embedding,
                    HeadCache* cache) {
  SDSV_CHECK(embedding.size() == p.cfg.input_dim,
             "input dim mismatch in head_forward");
  Vector h = embedding;
  std::vector<Vector> hidden;
  for (std::size_t i = 0; i < p.w.size(); ++i) {
    h = ((p.w[i] * h + p.b[i]).array().max(0.0)).matrix();
    hidden.push_back(h);
  }
  Vector bot = p.w_bot * h + p.b_bot;
  const double n = std::max(bot.norm(), kNormFloor);
  Vector unit = bot / n;

  Vector row_norms(p.v_dir.rows());
  Vector logits(p.v_dir.rows());
  for (Eigen::Index k = 0; k < p.v_dir.rows(); ++k) {
    row_norms(k) = std::max(p.v_dir.row(k).norm(), kNormFloor);
    logits(k) = p.v_dir.row(k).dot(unit) / row_norms(k);
  }

  if (cache) {
    cache->input = embedding;
    cache->hidden = std::move(hidden);
    cache->bottleneck = std::move(bot);
    cache->bottleneck_norm = n;
    cache->unit_bottleneck = std::move(unit);
    cache->row_norms = std::move(row_norms);
  }
  return logits;
}

Vector head_backward(const HeadParams& p, const HeadCache& cache,
                     const Vector& grad_logits, HeadParams& grads) {
  const Vector& u = cache.unit_bottleneck;

  // logits_k = v_k . u / ||v_k||
  Vector g_u = Vector::Zero(u.size());
  for (Eigen::Index k = 0; k < p.v_dir.rows(); ++k) {
    const double rn = cache.row_norms(k);
    const Vector v_hat = p.v_dir.row(k).transpose() / rn;
    const double proj = v_hat.dot(u);
    grads.v_dir.row(k) +=
        (grad_logits(k) / rn) * (u - proj * v_hat).transpose();
    g_u += grad_logits(k) * v_hat;
  }

  // u = bot / max(||bot||, floor)
  const double n = cache.bottleneck_norm;
  Vector g_bot = (g_u - u * u.dot(g_u)) / n;

  const Vector& pre_bot =
      cache.hidden.empty() ? cache.input : cache.hidden.back();
  grads.w_bot += g_bot * pre_bot.transpose();
  grads.b_bot += g_bot;
  Vector g_h = p.w_bot.transpose() * g_bot;

  for (int i = static_cast<int>(p.w.size()) - 1; i >= 0; --i) {
    Vector g_z =
        ((cache.hidden[i].array() > 0.0).cast<double>() * g_h.array())
            .matrix();
    const Vector& below =
        (i == 0) ? cache.input : cache.hidden[static_cast<std::size_t>(i - 1)];
    grads.w[i] += g_z * below.transpose();
    grads.b[i] += g_z;
    g_h = p.w[i].transpose() * g_z;
  }
  return g_h;
}

// ---------------------------------------------------------------------------
// Adam

AdamState AdamState::init(Eigen::Index n) {
  AdamState st;
  st.m = Vector::Zero(n);
  st.v = Vector::Zero(n);
  st.v_max = Vector::Zero(n);
  st.step = 0;
  return st;
}

void adam_step(std::vector<ParamRef>& params,
               const std::vector<ParamRef>& grads, AdamState& st,
               const AdamConfig& cfg, double lr,
               const std::vector<bool>* frozen) {
  SDSV_CHECK(params.size() == grads.size(), "param/grad count mismatch");
  Vector g = flatten(grads);
  SDSV_CHECK(g.size() == st.m.size(), "adam state size mismatch");
  if (!g.allFinite()) throw DivergedError("diverged: non-finite gradients");

  if (frozen) {
    SDSV_CHECK(frozen->size() == params.size(), "frozen mask size mismatch");
    Eigen::Index off = 0;
    for (std::size_t i = 0; i < params.size(); ++i) {
      if ((*frozen)[i]) g.segment(off, params[i].size()).setZero();
      off += params[i].size();
    }
  }

  st.step += 1;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(st.step));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(st.step));
  st.m = cfg.beta1 * st.m + (1.0 - cfg.beta1) * g;
  st.v = cfg.beta2 * st.v + (1.0 - cfg.beta2) * g.cwiseProduct(g);

  Vector m_hat = st.m / bc1;
  Vector v_hat = st.v / bc2;
  if (cfg.amsgrad) {
    st.v_max = st.v_max.cwiseMax(v_hat);
    v_hat = st.v_max;
  }

  Vector p = flatten(params);
  Vector denom = v_hat.array().sqrt() + cfg.eps;
  Vector update = lr * m_hat.cwiseQuotient(denom);

  // Decoupled weight decay, skipped for frozen blocks.
  if (cfg.weight_decay > 0.0) {
    Eigen::Index off = 0;
    for (std::size_t i = 0; i < params.size(); ++i) {
      if (!frozen || !(*frozen)[i])
        update.segment(off, params[i].size()) +=
            lr * cfg.weight_decay * p.segment(off, params[i].size());
      off += params[i].size();
    }
  }
  // Frozen blocks must be bit-identical, so zero their whole update
  // (moments can be nonzero from earlier unfrozen steps).
  if (frozen) {
    Eigen::Index off = 0;
    for (std::size_t i = 0; i < params.size(); ++i) {
      if ((*frozen)[i]) update.segment(off, params[i].size()).setZero();
      off += params[i].size();
    }
  }

  p -= update;
  unflatten(p, params);
}

// ---------------------------------------------------------------------------
// Gradient checker

double grad_check(std::vector<ParamRef>& params,
                  const std::function<double()>& loss, const Vector& analytic,
                  double h) {
  SDSV_CHECK(analytic.size() == total_size(params),
             "analytic gradient size mismatch");
  double max_rel = 0.0;
  Eigen::Index off = 0;
  for (auto& r : params) {
    for (Eigen::Index i = 0; i < r.size(); ++i) {
      double& x = r.data[i];
      const double orig = x;
      x = orig + h;
      const double lp = loss();
      x = orig - h;
      const double lm = loss();
      x = orig;
      const double numeric = (lp - lm) / (2.0 * h);
      const double a = analytic(off + i);
      const double rel =
          std::abs(a - numeric) /
          std::max(1e-8, std::abs(a) + std::abs(numeric));
      max_rel = std::max(max_rel, rel);
    }
    off += r.size();
  }
  return max_rel;
}

}  // namespace sdsv

// core/backend.cc

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

#include "sdsv/backend.hh"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "sdsv/checkpoint.hh"

namespace sdsv {

namespace {
constexpr double kNormFloor = 1e-12;
constexpr double kJitter = 1e-8;

// log det and inverse of a symmetric positive definite matrix via LLT,
// with jitter escalation on failure.
void spd_inverse(const Matrix& m, Matrix* inv, double* logdet) {
  Matrix a = 0.5 * (m + m.transpose());
  for (int attempt = 0; attempt < 3; ++attempt) {
    Eigen::LLT<Matrix> llt(a);
    if (llt.info() == Eigen::Success) {
      if (inv) *inv = llt.solve(Matrix::Identity(a.rows(), a.cols()));
      if (logdet) {
        double ld = 0.0;
        const Matrix l = llt.matrixL();
        for (Eigen::Index i = 0; i < l.rows(); ++i) ld += std::log(l(i, i));
        *logdet = 2.0 * ld;
      }
      return;
    }
    a += kJitter * std::pow(10.0, attempt) *
         Matrix::Identity(a.rows(), a.cols());
  }
  throw InputError("matrix is not positive definite even after jitter");
}

}  // namespace

double cosine_score(const Vector& e1, const Vector& e2) {
  SDSV_CHECK(e1.size() == e2.size(), "dimension mismatch in cosine_score");
  const double n1 = std::max(e1.norm(), kNormFloor);
  const double n2 = std::max(e2.norm(), kNormFloor);
  return e1.dot(e2) / (n1 * n2);
}

// ---------------------------------------------------------------------------
// PCA

PCAModel pca_fit(const Matrix& embeddings, int dim) {
  const Eigen::Index n = embeddings.rows();
  const Eigen::Index d = embeddings.cols();
  SDSV_CHECK(n >= 2, "pca needs at least 2 samples");
  SDSV_CHECK(dim >= 1 && dim <= std::min<Eigen::Index>(n - 1, d),
             "pca dim too large");

  PCAModel m;
  m.mean = embeddings.colwise().mean();
  Matrix centered = embeddings.rowwise() - m.mean.transpose();
  Matrix cov =
      centered.transpose() * centered / static_cast<double>(n - 1);

  Eigen::SelfAdjointEigenSolver<Matrix> es(cov);
  SDSV_CHECK(es.info() == Eigen::Success, "pca eigendecomposition failed");

  // Eigen returns ascending order; take the top-dim, descending.
  m.components.resize(d, dim);
  m.explained_variances.resize(dim);
  for (int k = 0; k < dim; ++k) {
    Vector comp = es.eigenvectors().col(d - 1 - k);
    // Deterministic sign: largest-magnitude entry positive.
    Eigen::Index imax;
    comp.cwiseAbs().maxCoeff(&imax);
    if (comp(imax) < 0) comp = -comp;
    m.components.col(k) = comp;
    m.explained_variances(k) = std::max(es.eigenvalues()(d - 1 - k), 0.0);
  }
  return m;
}

Vector pca_transform(const PCAModel& model, const Vector& e) {
  return model.components.transpose() * (e - model.mean);
}

Vector pca_inverse_transform(const PCAModel& model, const Vector& z) {
  return model.components * z + model.mean;
}

// ---------------------------------------------------------------------------
// PLDA

namespace {

struct SpeakerStats {
  int n = 0;
  Vector sum;  // sum of centered sessions
};

std::vector<SpeakerStats> accumulate_speakers(const Matrix& x,
                                              const std::vector<int>& labels,
                                              int n_speakers) {
  std::vector<SpeakerStats> stats(n_speakers);
  for (auto& s : stats) s.sum = Vector::Zero(x.cols());
  for (Eigen::Index j = 0; j < x.rows(); ++j) {
    stats[labels[j]].n += 1;
    stats[labels[j]].sum += x.row(j).transpose();
  }
  return stats;
}

}  // namespace

PLDAModel plda_fit(const Matrix& embeddings, const std::vector<int>& labels,
                   int q, int n_iter, const Matrix* v_init) {
  const Eigen::Index n = embeddings.rows();
  const Eigen::Index d = embeddings.cols();
  SDSV_CHECK(static_cast<Eigen::Index>(labels.size()) == n,
             "label count mismatch");
  SDSV_CHECK(q >= 1 && q <= d, "plda rank out of range");

  int n_speakers = 0;
  for (int l : labels) {
    SDSV_CHECK(l >= 0, "negative speaker label");
    n_speakers = std::max(n_speakers, l + 1);
  }
  SDSV_CHECK(n_speakers >= 2, "plda needs at least 2 speakers");

  PLDAModel m;
  m.mu = embeddings.colwise().mean();
  Matrix x = embeddings.rowwise() - m.mu.transpose();
  auto stats = accumulate_speakers(x, labels, n_speakers);

  bool multi_session = false;
  for (const auto& s : stats) multi_session |= (s.n >= 2);
  SDSV_CHECK(multi_session,
             "plda needs at least one speaker with >= 2 sessions");

  // Within-class scatter for initialization.
  Matrix s_within = Matrix::Zero(d, d);
  for (Eigen::Index j = 0; j < x.rows(); ++j) {
    const auto& s = stats[labels[j]];
    Vector dev = x.row(j).transpose() - s.sum / static_cast<double>(s.n);
    s_within += dev * dev.transpose();
  }
  m.sw = s_within / static_cast<double>(n) +
         kJitter * Matrix::Identity(d, d);

  if (v_init) {
    SDSV_CHECK(v_init->rows() == d && v_init->cols() == q,
               "v_init shape mismatch");
    m.v = *v_init;
  } else {
    // Top-q PCA directions scaled by sqrt of eigenvalues.
    PCAModel pca = pca_fit(embeddings, q);
    m.v.resize(d, q);
    for (int k = 0; k < q; ++k)
      m.v.col(k) = pca.components.col(k) *
                   std::sqrt(std::max(pca.explained_variances(k), kJitter));
  }

  const Matrix sum_xx = x.transpose() * x;

  for (int iter = 0; iter < n_iter; ++iter) {
    Matrix sw_inv;
    spd_inverse(m.sw, &sw_inv, nullptr);
    const Matrix vt_a = m.v.transpose() * sw_inv;  // q x d
    const Matrix vt_a_v = vt_a * m.v;              // q x q

    Matrix sum_s_ybar = Matrix::Zero(d, q);   // sum_i s_i ybar_i^T
    Matrix sum_n_eyy = Matrix::Zero(q, q);    // sum_i n_i E[y y^T]
    Matrix sum_ybar_s = Matrix::Zero(q, d);   // sum_i ybar_i s_i^T
    for (const auto& s : stats) {
      if (s.n == 0) continue;
      Matrix prec = Matrix::Identity(q, q) + s.n * vt_a_v;
      Matrix cov;
      spd_inverse(prec, &cov, nullptr);
      Vector ybar = cov * (vt_a * s.sum);
      Matrix eyy = cov + ybar * ybar.transpose();
      sum_s_ybar += s.sum * ybar.transpose();
      sum_ybar_s += ybar * s.sum.transpose();
      sum_n_eyy += s.n * eyy;
    }

    Matrix eyy_inv;
    spd_inverse(sum_n_eyy, &eyy_inv, nullptr);
    m.v = sum_s_ybar * eyy_inv;
    Matrix sw_new =
        (sum_xx - m.v * sum_ybar_s) / static_cast<double>(n);
    m.sw = 0.5 * (sw_new + sw_new.transpose()) +
           kJitter * Matrix::Identity(d, d);
  }
  return m;
}

double plda_marginal_loglik(const PLDAModel& model, const Matrix& embeddings,
                            const std::vector<int>& labels) {
  const Eigen::Index n = embeddings.rows();
  const Eigen::Index d = embeddings.cols();
  const Eigen::Index q = model.v.cols();
  SDSV_CHECK(static_cast<Eigen::Index>(labels.size()) == n,
             "label count mismatch");

  int n_speakers = 0;
  for (int l : labels) n_speakers = std::max(n_speakers, l + 1);
  Matrix x = embeddings.rowwise() - model.mu.transpose();
  auto stats = accumulate_speakers(x, labels, n_speakers);

  Matrix sw_inv;
  double ld_sw;
  spd_inverse(model.sw, &sw_inv, &ld_sw);
  const Matrix vt_a = model.v.transpose() * sw_inv;
  const Matrix vt_a_v = vt_a * model.v;

  // Per-speaker quadratic terms of sum_j x_j^T Sw^-1 x_j.
  std::vector<double> quad(n_speakers, 0.0);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Vector xi = x.row(j).transpose();
    quad[labels[j]] += xi.dot(sw_inv * xi);
  }

  double ll = 0.0;
  for (int i = 0; i < n_speakers; ++i) {
    const auto& s = stats[i];
    if (s.n == 0) continue;
    Matrix prec = Matrix::Identity(q, q) + s.n * vt_a_v;
    Matrix prec_inv;
    double ld_prec;
    spd_inverse(prec, &prec_inv, &ld_prec);
    const Vector proj = vt_a * s.sum;  // V^T Sw^-1 s_i
    const double quadform = quad[i] - proj.dot(prec_inv * proj);
    const double logdet = s.n * ld_sw + ld_prec;
    ll += -0.5 * (s.n * d * std::log(2.0 * M_PI) + logdet + quadform);
  }
  return ll;
}

PLDAScorer make_plda_scorer(const PLDAModel& model) {
  const Eigen::Index d = model.mu.size();
  const Matrix sb = model.sb();
  const Matrix st = sb + model.sw;

  PLDAScorer s;
  s.mu = model.mu;
  spd_inverse(st, &s.a_tot, &s.ld_tot);

  // Same-speaker joint covariance [[St, Sb], [Sb, St]]: Schur complement
  // M = St - Sb St^-1 Sb gives the precision blocks and determinant.
  const Matrix schur = st - sb * s.a_tot * sb;
  Matrix schur_inv;
  double ld_schur;
  spd_inverse(schur, &schur_inv, &ld_schur);
  s.q_same = schur_inv;
  s.p_same = -s.a_tot * sb * schur_inv;
  s.ld_same = s.ld_tot + ld_schur;
  SDSV_CHECK(s.q_same.rows() == d, "scorer dimension mismatch");
  return s;
}

double plda_llr(const PLDAScorer& s, const Vector& enroll,
                const Vector& test) {
  const Vector e = enroll - s.mu;
  const Vector t = test - s.mu;
  const double same = e.dot(s.q_same * e) + t.dot(s.q_same * t) +
                      2.0 * e.dot(s.p_same * t);
  const double diff = e.dot(s.a_tot * e) + t.dot(s.a_tot * t);
  return -0.5 * (same + s.ld_same) + 0.5 * (diff + 2.0 * s.ld_tot);
}

double plda_llr(const PLDAModel& model, const Vector& enroll,
                const Vector& test) {
  return plda_llr(make_plda_scorer(model), enroll, test);
}

Vector plda_classify(const PLDAModel& model, const Matrix& train_embeddings,
                     const std::vector<int>& train_labels, int n_classes,
                     const Vector& test) {
  SDSV_CHECK(n_classes >= 2, "need at least 2 classes");
  SDSV_CHECK(static_cast<Eigen::Index>(train_labels.size()) ==
                 train_embeddings.rows(),
             "label count mismatch");
  Matrix sums = Matrix::Zero(n_classes, train_embeddings.cols());
  std::vector<int> counts(n_classes, 0);
  for (Eigen::Index j = 0; j < train_embeddings.rows(); ++j) {
    const int c = train_labels[j];
    SDSV_CHECK(c >= 0 && c < n_classes, "class label out of range");
    sums.row(c) += train_embeddings.row(j);
    counts[c] += 1;
  }
  const PLDAScorer scorer = make_plda_scorer(model);
  Vector scores(n_classes);
  for (int c = 0; c < n_classes; ++c) {
    SDSV_CHECK(counts[c] > 0, "class with no enrollment data");
    const Vector enroll = sums.row(c).transpose() / counts[c];
    scores(c) = plda_llr(scorer, enroll, test);
  }
  return scores;
}

void save_plda(const std::string& path, const PLDAModel& model) {
  PLDAModel copy = model;
  std::vector<ParamRef> blocks = {
      {"plda.mu", copy.mu.data(), copy.mu.size(), 1},
      {"plda.v", copy.v.data(), copy.v.rows(), copy.v.cols()},
      {"plda.sw", copy.sw.data(), copy.sw.rows(), copy.sw.cols()},
  };
  save_checkpoint(path, "plda", blocks);
}

PLDAModel load_plda(const std::string& path) {
  // Shapes come from the file itself.
  std::ifstream probe(path);
  SDSV_CHECK(probe.good(), "cannot open plda model: " + path);
  int version;
  std::string hash, name;
  Eigen::Index rows, cols;
  SDSV_CHECK(static_cast<bool>(probe >> version >> hash),
             "bad plda model header: " + path);

  PLDAModel m;
  auto read_block = [&](const std::string& expect, auto setter) {
    SDSV_CHECK(static_cast<bool>(probe >> name >> rows >> cols),
               "truncated plda model: " + path);
    SDSV_CHECK(name == expect, "unexpected plda block: " + name);
    Matrix block(rows, cols);
    for (Eigen::Index i = 0; i < rows * cols; ++i)
      SDSV_CHECK(static_cast<bool>(probe >> block.data()[i]),
                 "truncated plda model: " + path);
    setter(std::move(block));
  };
  read_block("plda.mu", [&](Matrix b) { m.mu = b.col(0); });
  read_block("plda.v", [&](Matrix b) { m.v = std::move(b); });
  read_block("plda.sw", [&](Matrix b) { m.sw = std::move(b); });
  return m;
}

// ---------------------------------------------------------------------------
// Logistic regression

double logreg_objective(const LogRegModel& model, const Matrix& x,
                        const std::vector<int>& labels, double l2,
                        Matrix* grad_w, Vector* grad_b) {
  const Eigen::Index n = x.rows();
  const Eigen::Index C = model.weights.rows();
  if (grad_w) grad_w->setZero(C, x.cols());
  if (grad_b) grad_b->setZero(C);

  double nll = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    Vector logits = model.weights * x.row(j).transpose() + model.bias;
    const double mx = logits.maxCoeff();
    const double lse = mx + std::log((logits.array() - mx).exp().sum());
    nll -= (logits(labels[j]) - lse) / static_cast<double>(n);
    if (grad_w || grad_b) {
      Vector p = (logits.array() - lse).exp();
      Vector g = p / static_cast<double>(n);
      g(labels[j]) -= 1.0 / static_cast<double>(n);
      if (grad_w) *grad_w += g * x.row(j);
      if (grad_b) *grad_b += g;
    }
  }
  nll += 0.5 * l2 * model.weights.squaredNorm();
  if (grad_w) *grad_w += l2 * model.weights;
  return nll;
}

LogRegModel logreg_fit(const Matrix& x, const std::vector<int>& labels,
                       int n_classes, double l2, int max_iter) {
  SDSV_CHECK(n_classes >= 2, "need at least 2 classes");
  SDSV_CHECK(static_cast<Eigen::Index>(labels.size()) == x.rows(),
             "label count mismatch");

  LogRegModel m;
  m.weights = Matrix::Zero(n_classes, x.cols());
  m.bias = Vector::Zero(n_classes);

  double step = 1.0;
  for (int iter = 0; iter < max_iter; ++iter) {
    Matrix gw;
    Vector gb;
    const double f = logreg_objective(m, x, labels, l2, &gw, &gb);
    const double gnorm =
        std::sqrt(gw.squaredNorm() + gb.squaredNorm());
    if (gnorm < 1e-6) break;

    // Backtracking line search on the gradient direction.
    step *= 2.0;  // allow recovery after conservative steps
    for (int ls = 0; ls < 60; ++ls) {
      LogRegModel trial = m;
      trial.weights -= step * gw;
      trial.bias -= step * gb;
      const double ft = logreg_objective(trial, x, labels, l2, nullptr,
                                         nullptr);
      if (ft <= f - 1e-4 * step * gnorm * gnorm) {
        m = trial;
        break;
      }
      step *= 0.5;
    }
  }
  return m;
}

Vector logreg_predict(const LogRegModel& model, const Vector& x) {
  Vector logits = model.weights * x + model.bias;
  const double mx = logits.maxCoeff();
  Vector p = (logits.array() - mx).exp();
  return p / p.sum();
}

}  // namespace sdsv

// core/backend.hh

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

#ifndef SDSV_BACKEND_HH_
#define SDSV_BACKEND_HH_

#include <string>
#include <vector>

#include "sdsv/common.hh"

namespace sdsv {

// Cosine similarity with a 1e-12 norm floor; invariant to positive scaling.
double cosine_score(const Vector& e1, const Vector& e2);

// ---------------------------------------------------------------------------
// PCA

struct PCAModel {
  Vector mean;
  Matrix components;  // D x dim, orthonormal columns
  Vector explained_variances;  // non-increasing
};

// Eigendecomposition of the sample covariance (1/(n-1)); components carry a
// deterministic sign (largest-magnitude entry positive).
PCAModel pca_fit(const Matrix& embeddings, int dim);
Vector pca_transform(const PCAModel& model, const Vector& e);
Vector pca_inverse_transform(const PCAModel& model, const Vector& z);

// ---------------------------------------------------------------------------
// PLDA: w_ij = mu + V y_i + eps_ij,  y ~ N(0, I),  eps ~ N(0, S_W)

struct PLDAModel {
  Vector mu;
  Matrix v;    // D x q eigen-voice matrix
  Matrix sw;   // D x D within-class covariance

  Matrix sb() const { return v * v.transpose(); }
};

// EM fit.  rows of embeddings are sessions; labels give the speaker of each
// row.  mu is the global mean (fixed); V and S_W are re-estimated each
// iteration.  v_init overrides the default PCA-based initialization.
PLDAModel plda_fit(const Matrix& embeddings, const std::vector<int>& labels,
                   int q, int n_iter, const Matrix* v_init = nullptr);

// Marginal log-likelihood of the data under the model (the quantity EM is
// guaranteed not to decrease).
double plda_marginal_loglik(const PLDAModel& model, const Matrix& embeddings,
                            const std::vector<int>& labels);

// Precomputed matrices for repeated LLR scoring.
struct PLDAScorer {
  Vector mu;
  Matrix q_same;   // joint-precision diagonal block
  Matrix p_same;   // joint-precision off-diagonal block
  Matrix a_tot;    // inverse total covariance
  double ld_same;  // log det of the same-speaker joint covariance
  double ld_tot;   // log det of the total covariance
};

PLDAScorer make_plda_scorer(const PLDAModel& model);
double plda_llr(const PLDAScorer& scorer, const Vector& enroll,
                const Vector& test);
// Convenience single-pair form.
double plda_llr(const PLDAModel& model, const Vector& enroll,
                const Vector& test);

// Classifier mode: each class is enrolled as the average of its training
// embeddings; a test embedding is scored against every class by LLR.
Vector plda_classify(const PLDAModel& model, const Matrix& train_embeddings,
                     const std::vector<int>& train_labels, int n_classes,
                     const Vector& test);

// Model file round trip (text checkpoint format).
void save_plda(const std::string& path, const PLDAModel& model);
PLDAModel load_plda(const std::string& path);

// ---------------------------------------------------------------------------
// Multiclass logistic regression (full-batch gradient descent with
// backtracking line search; converged when the gradient norm < 1e-6).

struct LogRegModel {
  Matrix weights;  // n_classes x D
  Vector bias;
};

LogRegModel logreg_fit(const Matrix& x, const std::vector<int>& labels,
                       int n_classes, double l2 = 1e-2, int max_iter = 2000);
Vector logreg_predict(const LogRegModel& model, const Vector& x);

// Regularized NLL and its gradient norm at the current parameters (exposed
// for convergence checks).
double logreg_objective(const LogRegModel& model, const Matrix& x,
                        const std::vector<int>& labels, double l2,
                        Matrix* grad_w = nullptr, Vector* grad_b = nullptr);

}  // namespace sdsv

#endif  // SDSV_BACKEND_HH_

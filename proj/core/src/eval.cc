// core/eval.cc

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

#include "sdsv/eval.hh"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "sdsv/rng.hh"

namespace sdsv {

std::vector<DetPoint> det_sweep(const std::vector<double>& target_scores,
                                const std::vector<double>& nontarget_scores) {
  SDSV_CHECK(!target_scores.empty(), "det_sweep: no target trials");
  SDSV_CHECK(!nontarget_scores.empty(), "det_sweep: no nontarget trials");
  std::vector<double> thr;
  thr.reserve(target_scores.size() + nontarget_scores.size() + 2);
  thr.insert(thr.end(), target_scores.begin(), target_scores.end());
  thr.insert(thr.end(), nontarget_scores.begin(), nontarget_scores.end());
  std::sort(thr.begin(), thr.end());
  thr.erase(std::unique(thr.begin(), thr.end()), thr.end());
  const double inf = std::numeric_limits<double>::infinity();
  thr.insert(thr.begin(), -inf);
  thr.push_back(inf);

  // Sorted copies let each operating point come from two binary searches.
  std::vector<double> tgt(target_scores), non(nontarget_scores);
  std::sort(tgt.begin(), tgt.end());
  std::sort(non.begin(), non.end());
  std::vector<DetPoint> out;
  out.reserve(thr.size());
  for (double t : thr) {
    DetPoint p;
    p.threshold = t;
    const auto n_miss =
        std::lower_bound(tgt.begin(), tgt.end(), t) - tgt.begin();
    const auto n_fa = non.end() - std::lower_bound(non.begin(), non.end(), t);
    p.p_miss = static_cast<double>(n_miss) / tgt.size();
    p.p_fa = static_cast<double>(n_fa) / non.size();
    out.push_back(p);
  }
  return out;
}

double eer(const std::vector<double>& target_scores,
           const std::vector<double>& nontarget_scores) {
  const auto sweep = det_sweep(target_scores, nontarget_scores);
  // The DET curve proper is the staircase of Pareto-minimal operating
  // points; interior points of equal-P_fa or equal-P_miss runs are
  // dominated and must not take part in the interpolation.
  std::vector<DetPoint> env;
  env.push_back({-std::numeric_limits<double>::infinity(), 1.0, 0.0});
  for (std::size_t i = 0; i < sweep.size(); ++i) {
    const bool first_of_fa_run = i == 0 || sweep[i].p_fa != sweep[i - 1].p_fa;
    const bool last_of_miss_run =
        i + 1 == sweep.size() || sweep[i + 1].p_miss != sweep[i].p_miss;
    if (first_of_fa_run && last_of_miss_run) env.push_back(sweep[i]);
  }
  env.push_back({std::numeric_limits<double>::infinity(), 0.0, 1.0});
  // P_fa - P_miss runs from +1 to -1 along the envelope; interpolate at the
  // sign change.
  for (std::size_t i = 0; i + 1 < env.size(); ++i) {
    const double d0 = env[i].p_fa - env[i].p_miss;
    const double d1 = env[i + 1].p_fa - env[i + 1].p_miss;
    if (d0 >= 0.0 && d1 < 0.0) {
      if (d0 == 0.0) return 0.5 * (env[i].p_fa + env[i].p_miss);
      const double a = d0 / (d0 - d1);
      const double p_fa = env[i].p_fa + a * (env[i + 1].p_fa - env[i].p_fa);
      const double p_miss =
          env[i].p_miss + a * (env[i + 1].p_miss - env[i].p_miss);
      return 0.5 * (p_fa + p_miss);
    }
  }
  return 0.0;  // unreachable: the sentinels bracket a sign change
}

double min_dcf(const std::vector<double>& target_scores,
               const std::vector<double>& nontarget_scores, double p_target,
               double c_miss, double c_fa) {
  const auto sweep = det_sweep(target_scores, nontarget_scores);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : sweep) {
    const double dcf =
        c_miss * p_target * p.p_miss + c_fa * (1.0 - p_target) * p.p_fa;
    best = std::min(best, dcf);
  }
  const double norm = std::min(c_miss * p_target, c_fa * (1.0 - p_target));
  return best / norm;
}

double accuracy(const std::vector<int>& predicted,
                const std::vector<int>& truth) {
  SDSV_CHECK(predicted.size() == truth.size() && !truth.empty(),
             "accuracy: size mismatch");
  int hit = 0;
  for (std::size_t i = 0; i < truth.size(); ++i)
    if (predicted[i] == truth[i]) ++hit;
  return static_cast<double>(hit) / truth.size();
}

std::vector<int> kfold_assign(int n, int k, FoldStratify strat,
                              const std::vector<int>& class_or_group,
                              std::uint64_t seed) {
  SDSV_CHECK(n > 0 && k >= 2 && k <= n, "kfold: need 2 <= k <= n");
  Rng rng(seed);
  std::vector<int> folds(n, -1);
  if (strat == FoldStratify::kNone) {
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    for (int i = n - 1; i > 0; --i)
      std::swap(order[i], order[rng.uniform_int(i + 1)]);
    for (int i = 0; i < n; ++i) folds[order[i]] = i % k;
    return folds;
  }
  SDSV_CHECK(static_cast<int>(class_or_group.size()) == n,
             "kfold: stratification labels must cover all items");
  if (strat == FoldStratify::kClass) {
    // Round-robin within each class so fold class distributions match.
    std::map<int, std::vector<int>> by_class;
    for (int i = 0; i < n; ++i) by_class[class_or_group[i]].push_back(i);
    int next = 0;
    for (auto& [cls, items] : by_class) {
      (void)cls;
      for (int i = static_cast<int>(items.size()) - 1; i > 0; --i)
        std::swap(items[i], items[rng.uniform_int(i + 1)]);
      for (int idx : items) folds[idx] = (next++) % k;
    }
    return folds;
  }
  // kGroup: deal whole groups onto the currently smallest fold, biggest
  // groups first, so no group straddles folds and sizes stay balanced.
  std::map<int, std::vector<int>> by_group;
  for (int i = 0; i < n; ++i) by_group[class_or_group[i]].push_back(i);
  SDSV_CHECK(static_cast<int>(by_group.size()) >= k,
             "kfold: fewer groups than folds");
  std::vector<std::pair<int, int>> groups;  // (group id, size)
  for (const auto& [g, items] : by_group)
    groups.emplace_back(g, static_cast<int>(items.size()));
  for (int i = static_cast<int>(groups.size()) - 1; i > 0; --i)
    std::swap(groups[i], groups[rng.uniform_int(i + 1)]);
  std::stable_sort(groups.begin(), groups.end(),
                   [](const auto& a, const auto& b) {
                     return a.second > b.second;
                   });
  std::vector<int> load(k, 0);
  for (const auto& [g, sz] : groups) {
    const int f = static_cast<int>(
        std::min_element(load.begin(), load.end()) - load.begin());
    for (int idx : by_group[g]) folds[idx] = f;
    load[f] += sz;
  }
  return folds;
}

}  // namespace sdsv

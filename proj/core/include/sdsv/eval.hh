// core/eval.hh

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

#ifndef SDSV_EVAL_HH_
#define SDSV_EVAL_HH_

#include <cstdint>
#include <string>
#include <vector>

#include "sdsv/common.hh"

namespace sdsv {

struct DetPoint {
  double threshold;  // decision rule: accept iff score >= threshold
  double p_fa;       // fraction of nontarget scores >= threshold
  double p_miss;     // fraction of target scores < threshold
};

// Operating points at every distinct score plus -inf/+inf sentinels,
// ordered by increasing threshold (P_fa non-increasing, P_miss
// non-decreasing along the sweep).
std::vector<DetPoint> det_sweep(const std::vector<double>& target_scores,
                                const std::vector<double>& nontarget_scores);

// Equal error rate by linear interpolation at the sign change of
// P_fa - P_miss along the DET sweep.
double eer(const std::vector<double>& target_scores,
           const std::vector<double>& nontarget_scores);

// Minimum normalized detection cost over the sweep:
// min over thresholds of (c_miss p_t P_miss + c_fa (1-p_t) P_fa),
// normalized by min(c_miss p_t, c_fa (1-p_t)).
double min_dcf(const std::vector<double>& target_scores,
               const std::vector<double>& nontarget_scores,
               double p_target = 0.01, double c_miss = 1.0,
               double c_fa = 1.0);

double accuracy(const std::vector<int>& predicted,
                const std::vector<int>& truth);

enum class FoldStratify { kNone, kClass, kGroup };

// k-fold partition of n items, deterministic in seed.  kClass balances the
// class distribution across folds; kGroup keeps all items of a group in a
// single fold.  Returns the fold index of each item.
std::vector<int> kfold_assign(int n, int k, FoldStratify strat,
                              const std::vector<int>& class_or_group,
                              std::uint64_t seed);

}  // namespace sdsv

#endif  // SDSV_EVAL_HH_

// core/common.hh

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

#ifndef SDSV_COMMON_HH_
#define SDSV_COMMON_HH_

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

namespace sdsv {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Errors from bad inputs or configuration.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failure during optimization (non-finite loss or gradients).
class DivergedError : public std::runtime_error {
 public:
  explicit DivergedError(const std::string& msg) : std::runtime_error(msg) {}
};

#define SDSV_CHECK(cond, msg) \
  do { if (!(cond)) throw ::sdsv::InputError(msg); } while (0)

// A mono waveform plus its sample rate.
struct Waveform {
  std::vector<double> samples;
  int sample_rate = 16000;
};

// Row-per-frame feature sequence (T x D).
struct FeatureMatrix {
  Matrix frames;            // T x D
  double frame_hop_s = 0.010;
};

}  // namespace sdsv

#endif  // SDSV_COMMON_HH_

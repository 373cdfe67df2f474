// core/rng.hh

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

#ifndef SDSV_RNG_HH_
#define SDSV_RNG_HH_

#include <cstdint>
#include <string>

namespace sdsv {

// Splittable counter-based generator (splitmix64 core).  All sampling is
// implemented in-repo so that streams are bit-identical across platforms
// and standard-library versions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64();

  // Uniform in [0, 1) with 53 bits of mantissa.
  double uniform();

  // Uniform in [lo, hi).
  double uniform(double lo, double hi);

  // Uniform integer in [0, n); n > 0.
  std::uint64_t uniform_int(std::uint64_t n);

  // Standard normal via Box-Muller (no cached spare; one pair per call).
  double gaussian();

  // Derive an independent child stream, e.g. per utterance or per epoch.
  Rng derive(std::uint64_t salt) const;
  Rng derive(const std::string& salt) const;

 private:
  std::uint64_t state_;
};

}  // namespace sdsv

#endif  // SDSV_RNG_HH_

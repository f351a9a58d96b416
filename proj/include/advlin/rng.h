// Copyright 2026 The adv-linmdp Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <string_view>

#include <Eigen/Core>

namespace advlin {

// 64-bit FNV-1a, used to turn purpose tags into stream keys.
std::uint64_t hash_tag(std::string_view tag);

// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Counter-based random stream.
///
/// A stream is identified by a key derived from (seed, purpose tag, index);
/// the n-th output is a pure function of (key, n). Two streams with the same
/// identity produce the same sequence on every platform, and streams with
/// different identities are statistically independent. All sampling helpers
/// are implemented here rather than through <random> distributions so that
/// the produced values do not depend on the standard library vendor.
///
/// Satisfies UniformRandomBitGenerator.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  RandomStream(std::uint64_t seed, std::string_view purpose,
               std::uint64_t index = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()();

  // Uniform on [0, 1) with 53 bits of resolution.
  double uniform();
  // Uniform on [lo, hi).
  double uniform(double lo, double hi);
  // Uniform integer on [0, n); n must be positive.
  std::size_t uniform_index(std::size_t n);
  bool bernoulli(double p);
  // Standard exponential variate.
  double exponential();
  // Standard normal variate (Box-Muller, one value per call).
  double normal();
  // Index drawn from a nonnegative weight vector (need not be normalized).
  std::size_t categorical(const Eigen::Ref<const Eigen::VectorXd>& weights);
  // Uniform point on the probability simplex of the given dimension.
  Eigen::VectorXd dirichlet_flat(int dim);

  // Independent child stream. Deterministic in (this stream's key, purpose,
  // index) and independent of how many values this stream has produced.
  RandomStream fork(std::string_view purpose, std::uint64_t index = 0) const;

  std::uint64_t key() const { return key_; }
  std::uint64_t position() const { return counter_; }

 private:
  explicit RandomStream(std::uint64_t key) : key_(key) {}

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace advlin

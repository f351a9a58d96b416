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

#include "advlin/rng.h"

#include <cmath>
#include <numbers>

#include "advlin/errors.h"

namespace advlin {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t hash_tag(std::string_view tag) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char ch : tag) {
    h ^= ch;
    h *= 0x100000001B3ULL;
  }
  return h;
}

std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return x;
}

RandomStream::RandomStream(std::uint64_t seed, std::string_view purpose,
                           std::uint64_t index)
    : key_(mix64(mix64(seed + kGolden) ^ hash_tag(purpose)) ^
           mix64(index * kGolden + 0x632BE59BD9B4E019ULL)) {}

RandomStream::result_type RandomStream::operator()() {
  ++counter_;
  return mix64(key_ + counter_ * kGolden);
}

double RandomStream::uniform() {
  return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

double RandomStream::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform();
}

std::size_t RandomStream::uniform_index(std::size_t n) {
  if (n == 0) throw InputError("uniform_index: n must be positive");
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  // Rejection to remove modulo bias.
  const std::uint64_t limit = max() - (max() % bound) - 1;
  std::uint64_t draw = (*this)();
  while (draw > limit) draw = (*this)();
  return static_cast<std::size_t>(draw % bound);
}

bool RandomStream::bernoulli(double p) { return uniform() < p; }

double RandomStream::exponential() {
  // 1 - u lies in (0, 1], so the log is finite.
  return -std::log1p(-uniform());
}

double RandomStream::normal() {
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

std::size_t RandomStream::categorical(
    const Eigen::Ref<const Eigen::VectorXd>& weights) {
  const double total = weights.sum();
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw InputError("categorical: weights must have positive finite sum");
  }
  const double u = uniform() * total;
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    if (weights[i] > 0.0) last_positive = static_cast<std::size_t>(i);
    acc += weights[i];
    if (u < acc) return static_cast<std::size_t>(i);
  }
  return last_positive;
}

Eigen::VectorXd RandomStream::dirichlet_flat(int dim) {
  Eigen::VectorXd x(dim);
  for (int i = 0; i < dim; ++i) x[i] = exponential();
  double s = x.sum();
  if (s <= 0.0) {
    x.setConstant(1.0 / dim);
    return x;
  }
  return x / s;
}

RandomStream RandomStream::fork(std::string_view purpose,
                                std::uint64_t index) const {
  return RandomStream(mix64(key_ ^ hash_tag(purpose)) ^
                      mix64((index + 1) * kGolden));
}

}  // namespace advlin

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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "advlin/mdp.h"
#include "advlin/rng.h"

namespace advlin {

enum class EnvKind { kTabularOnehot, kRandomLinearMdp };

struct EnvSpec {
  EnvKind kind = EnvKind::kTabularOnehot;
  int H = 1;
  int A = 2;
  // 0 means "derive": max layer size times A for one-hot, required otherwise.
  int d = 0;
  std::vector<int> layer_sizes{1};
  std::optional<std::uint64_t> seed;
};

enum class LossKind { kIidUniform, kPiecewiseConstant, kSinusoidalDrift };

// How per-episode values are laid out over (s, a).
//   kTabular: every (s, a) gets its own value.
//   kLinear:  values are drawn per (layer, feature coordinate) as a vector
//             g in [0,1]^d and the loss is <phi(s, a), g>.
enum class LossStructure { kTabular, kLinear };

struct LossSpec {
  LossKind kind = LossKind::kIidUniform;
  LossStructure structure = LossStructure::kTabular;
  double amplitude = 0.5;
  int period = 64;           // sinusoidal_drift
  int segment_length = 64;   // piecewise_constant
  std::optional<std::uint64_t> seed;
};

std::string to_string(EnvKind kind);
std::string to_string(LossKind kind);
std::string to_string(LossStructure structure);
EnvKind parse_env_kind(const std::string& name);
LossKind parse_loss_kind(const std::string& name);
LossStructure parse_loss_structure(const std::string& name);

// Tabular MDP with within-layer one-hot features: phi(h, i, a) = e_{i*A + a}.
// Transition rows are uniform draws from the simplex.
LayeredMdp gen_tabular_onehot(const EnvSpec& spec, RandomStream& rng);

// Linear MDP with P(s'|s,a) = <phi(s,a), nu_h(s')>.
struct LinearMdpInstance {
  LayeredMdp mdp;
  // nu[h-1] is d x |S_{h+1}|; each row is a distribution over layer h+1.
  std::vector<Eigen::MatrixXd> nu;
};
LinearMdpInstance gen_random_linear_mdp(const EnvSpec& spec,
                                        RandomStream& rng);

struct GeneratedLosses {
  LossTable table;
  std::uint64_t clipped = 0;  // entries moved by clipping to [0, 1]
};
GeneratedLosses gen_losses(const LossSpec& spec, const LayeredMdp& mdp,
                           int episodes, RandomStream& rng);

// Minimum-norm least-squares fit of Q(s, .) = phi(s, .)^T theta_h per layer.
struct LinearQWitness {
  std::vector<Eigen::VectorXd> theta;  // theta[h-1]
  std::vector<double> residual;        // max |phi^T theta - Q| per layer
  double max_residual() const;
  double max_theta_norm() const;
};
LinearQWitness fit_linear_q(const LayeredMdp& mdp, const StateActionTable& q);

}  // namespace advlin

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

#include <span>
#include <vector>

#include <Eigen/Core>

#include "advlin/mdp.h"
#include "advlin/rng.h"

namespace advlin {

// 0 if y <= -z, 1 if y >= 0, y / z + 1 otherwise.
double ramp(double z, double y);

struct PolicyCoverParams {
  long long M0 = 1;
  long long N0 = 1;
  double alpha = 1.0;
  double delta = 0.1;
  long long K = 1;  // horizon used in the ramp width 1/K and in beta_tilde
  // Optimism coefficient; <= 0 means 60 d H sqrt(ln(K / delta)).
  double beta_tilde = 0.0;
};

double default_beta_tilde(int d, int H, long long K, double delta);

struct PolicyCoverResult {
  std::vector<Policy> components;          // pi_1 .. pi_M0, deterministic
  std::vector<Eigen::MatrixXd> sigma_cov;  // Gamma_{M0+1,h} / M0, per layer
  std::vector<bool> known;                 // per flat state
  // The M0 * N0 real episodes in execution order, component index in
  // component_of[i]. Losses are filled from `losses` when one is given.
  std::vector<Trajectory> episodes;
  std::vector<int> component_of;
  double beta_tilde = 0.0;
};

// Reward-free exploration by optimistic least-squares value iteration on the
// ramp reward. Episode i of the cover uses losses.episode(first_episode + i).
PolicyCoverResult run_policy_cover(const LayeredMdp& mdp,
                                   const PolicyCoverParams& params,
                                   RandomStream& rng,
                                   const LossTable* losses = nullptr,
                                   int first_episode = 0);

// s is known iff ||phi(s, a)||^2_{sigma^{-1}} <= alpha for every action.
std::vector<bool> known_states(const LayeredMdp& mdp,
                               const std::vector<Eigen::MatrixXd>& sigma_cov,
                               double alpha);

// Value of the uniform mixture when one component is drawn per episode.
double mixture_value(const LayeredMdp& mdp, std::span<const double> loss,
                     const std::vector<Policy>& components);

}  // namespace advlin

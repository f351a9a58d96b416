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
#include <vector>

#include <Eigen/Core>

#include "advlin/mdp.h"
#include "advlin/rng.h"

namespace advlin {

// b(s, a) = beta (||phi(s,a)||^2_S + E_{a'~policy_row} ||phi(s,a')||^2_S).
// `phi_s` is the d x A matrix of features at s.
double bonus_b(const Eigen::MatrixXd& phi_s, int a,
               const Eigen::VectorXd& policy_row, const Eigen::MatrixXd& cov_inv,
               double beta);

// b for every (s, a). `cov_inv[h-1]` is the matrix for layer h. If `known`
// is non-empty, states with known[s] == false get zero bonus.
StateActionTable bonus_table(const LayeredMdp& mdp, const Policy& policy,
                             const std::vector<Eigen::MatrixXd>& cov_inv,
                             double beta, const std::vector<bool>& known = {});

// B(s,a) = b(s,a) + 1[layer < H] (1 + 1/H) E_{s'~P, a'~policy} B(s', a').
StateActionTable dilated_bonus_exact(const LayeredMdp& mdp,
                                     const Policy& policy,
                                     const StateActionTable& b);
// max |B - b - (1+1/H) E B'| over all (s, a).
double dilated_bonus_residual(const LayeredMdp& mdp, const Policy& policy,
                              const StateActionTable& b,
                              const StateActionTable& B);

/// Single-sample recursive estimate of B for one episode, memoized per
/// (s, a). Each first-time query at a non-terminal pair costs one simulator
/// call. Not thread-safe.
class DilatedBonusCache {
 public:
  DilatedBonusCache(Simulator& sim, const Policy& policy,
                    const StateActionTable& b, int episode);

  double query(std::size_t s, int a, RandomStream& rng);
  int episode() const { return episode_; }
  std::size_t size() const { return filled_; }
  std::uint64_t simulator_calls() const { return calls_; }

 private:
  Simulator* sim_;
  const Policy* policy_;
  const StateActionTable* b_;
  int episode_;
  Eigen::MatrixXd pt_;  // transposed policy, contiguous action columns
  std::vector<double> memo_;
  std::vector<char> has_;
  std::size_t filled_ = 0;
  std::uint64_t calls_ = 0;
};

/// One episode collected inside an epoch of the simulator-free learner.
struct EpochSample {
  Trajectory trajectory;
  bool explore = false;  // Y_k
  int switch_layer = 0;  // h_k, only meaningful when explore is set
};

// Weight (1 - Y) + Y H 1[h = h_k].
double kernel_weight(const EpochSample& e, int h, int H);

// Lambda_hat_h = S_h mean_k weight phi(s_kh, a_kh) D_kh, where
// D_kh = sum_{h'=h+1}^H (1+1/H)^{h'-h} b(s_kh', a_kh'). Returns one vector
// per layer.
std::vector<Eigen::VectorXd> estimate_bonus_kernel(
    const LayeredMdp& mdp, const std::vector<EpochSample>& samples,
    const StateActionTable& b, const std::vector<Eigen::MatrixXd>& cov_inv);

// theta_hat_h = S_h mean_k weight phi(s_kh, a_kh) L_kh.
std::vector<Eigen::VectorXd> estimate_q_kernel(
    const LayeredMdp& mdp, const std::vector<EpochSample>& samples,
    const std::vector<Eigen::MatrixXd>& cov_inv);

}  // namespace advlin

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

#include <compare>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "advlin/rng.h"

namespace advlin {

/// A state addressed by its layer (1-based) and its index within the layer.
struct StateId {
  int layer = 1;
  int index = 0;
  auto operator<=>(const StateId&) const = default;
};

/// Table indexed by (flat state, action). Rows are states in flat order.
using StateActionTable = Eigen::MatrixXd;

/// Finite layered episodic MDP with a feature map.
///
/// States are stored in flat order: layer 1 first, then layer 2, and so on.
/// Every layer-h state transitions only to layer h+1; layer 1 holds the
/// single initial state. Transition rows are stored over the *local* indices
/// of the next layer. Immutable after construction.
class LayeredMdp {
 public:
  /// `features[s * A + a]` is phi(s, a) in R^d; `transitions[s * A + a]` is
  /// P(. | s, a) over layer(s)+1 for every state not in the last layer.
  /// Rows whose sum is within 1e-9 of one are renormalized; anything else is
  /// rejected with InputError.
  LayeredMdp(int horizon, int num_actions, int feature_dim,
             std::vector<int> layer_sizes,
             std::vector<Eigen::VectorXd> features,
             std::vector<Eigen::VectorXd> transitions);

  int horizon() const { return horizon_; }
  int num_actions() const { return num_actions_; }
  int feature_dim() const { return feature_dim_; }
  const std::vector<int>& layer_sizes() const { return layer_sizes_; }
  int layer_size(int layer) const { return layer_sizes_.at(layer - 1); }
  std::size_t num_states() const { return layer_of_.size(); }

  // First flat index of `layer` (1-based); layer_begin(H+1) == num_states().
  std::size_t layer_begin(int layer) const { return offsets_.at(layer - 1); }
  std::size_t layer_end(int layer) const { return offsets_.at(layer); }
  int layer_of(std::size_t s) const { return layer_of_.at(s); }
  std::size_t flat(const StateId& id) const;
  StateId state_id(std::size_t s) const;
  std::size_t initial_state() const { return 0; }

  const Eigen::VectorXd& feature(std::size_t s, int a) const {
    return features_[s * num_actions_ + a];
  }
  // d x A matrix whose columns are phi(s, a).
  Eigen::MatrixXd state_features(std::size_t s) const;
  // P(. | s, a) over the local indices of layer(s)+1.
  const Eigen::VectorXd& transition(std::size_t s, int a) const;
  // Flat index of local state `local` in the layer after s.
  std::size_t successor_flat(std::size_t s, std::size_t local) const {
    return offsets_[layer_of_[s]] + local;
  }

 private:
  int horizon_;
  int num_actions_;
  int feature_dim_;
  std::vector<int> layer_sizes_;
  std::vector<std::size_t> offsets_;
  std::vector<int> layer_of_;
  std::vector<Eigen::VectorXd> features_;
  std::vector<Eigen::VectorXd> transitions_;
};

/// Per-episode loss tables, entries in [0, 1]. Episodes are 0-based here;
/// files and traces number them from 1.
class LossTable {
 public:
  LossTable(int episodes, std::size_t num_states, int num_actions);
  LossTable(int episodes, std::size_t num_states, int num_actions,
            std::vector<double> values);

  int episodes() const { return episodes_; }
  std::size_t num_states() const { return num_states_; }
  int num_actions() const { return num_actions_; }

  double at(int k, std::size_t s, int a) const {
    return values_[index(k, s, a)];
  }
  void set(int k, std::size_t s, int a, double v);
  // Losses of episode k, row-major over (state, action).
  std::span<const double> episode(int k) const;
  // Sum over all episodes, as a per-(s, a) table.
  StateActionTable total() const;
  StateActionTable episode_table(int k) const;

 private:
  std::size_t index(int k, std::size_t s, int a) const {
    return (static_cast<std::size_t>(k) * num_states_ + s) * num_actions_ + a;
  }

  int episodes_;
  std::size_t num_states_;
  int num_actions_;
  std::vector<double> values_;
};

/// Markov policy: one distribution over actions per state.
class Policy {
 public:
  /// `probs` is num_states x A. Rows within 1e-9 of summing to one are
  /// renormalized; negative entries or larger deviations throw InputError.
  explicit Policy(Eigen::MatrixXd probs);

  static Policy uniform(const LayeredMdp& mdp);
  static Policy deterministic(const LayeredMdp& mdp,
                              const std::vector<int>& actions);
  // Layers [1, switch_layer) follow `before`, the rest follow `after`.
  static Policy splice(const LayeredMdp& mdp, const Policy& before,
                       const Policy& after, int switch_layer);

  std::size_t num_states() const {
    return static_cast<std::size_t>(probs_.rows());
  }
  int num_actions() const { return static_cast<int>(probs_.cols()); }
  double prob(std::size_t s, int a) const { return probs_(s, a); }
  Eigen::VectorXd row(std::size_t s) const { return probs_.row(s).transpose(); }
  const Eigen::MatrixXd& matrix() const { return probs_; }

 private:
  Eigen::MatrixXd probs_;
};

/// One step of an executed episode.
struct Step {
  std::size_t state = 0;  // flat index
  int action = 0;
  double loss = 0.0;
};

/// An executed or simulated episode; steps[h-1] is at layer h.
struct Trajectory {
  int episode = 0;
  std::vector<Step> steps;

  // L_h = sum of step losses from layer h to H, for h = 1..H (index h-1).
  std::vector<double> suffix_losses() const;
  double total_loss() const;
};

// Exact Q-function of `policy` under one episode's losses.
// Throws InputError if the loss span does not have num_states * A entries.
StateActionTable q_values_exact(const LayeredMdp& mdp,
                                std::span<const double> loss,
                                const Policy& policy);
double v_value_exact(const LayeredMdp& mdp, std::span<const double> loss,
                     const Policy& policy);

// Probability of visiting each state under `policy` (each layer sums to 1).
std::vector<double> state_occupancy(const LayeredMdp& mdp,
                                    const Policy& policy);
// Sigma_h = E[phi phi^T] over (s_h, a_h) drawn from `policy`.
Eigen::MatrixXd covariance_exact(const LayeredMdp& mdp, const Policy& policy,
                                 int layer);
// E[phi(s_h, a_h) * L_h] where L_h is the loss-to-go; used as the exact
// mean of single-trajectory Q-kernel estimates.
Eigen::VectorXd feature_loss_moment_exact(const LayeredMdp& mdp,
                                          std::span<const double> loss,
                                          const Policy& policy, int layer);

struct HindsightOptimum {
  Policy policy;
  double total_value;  // sum over episodes of V_k^policy(s_1)
};
// Deterministic policy minimizing the summed value over every episode.
// Ties go to the lowest action index.
HindsightOptimum optimal_policy_in_hindsight(const LayeredMdp& mdp,
                                             const LossTable& losses);

/// Row-sampling access to the true transition, with call accounting.
/// One Simulator per run context; not shared across threads.
class Simulator {
 public:
  static constexpr std::uint64_t kUnlimited =
      std::numeric_limits<std::uint64_t>::max();

  explicit Simulator(const LayeredMdp& mdp,
                     std::uint64_t budget = kUnlimited);

  // s' ~ P(. | s, a). Throws LayerBoundaryError at the last layer and
  // BudgetError once the budget is spent.
  std::size_t step(std::size_t s, int a, RandomStream& rng);
  StateId step(const StateId& s, int a, RandomStream& rng);

  // Throws BudgetError unless `calls` more calls fit in the budget.
  void require(std::uint64_t calls) const;
  // Full simulated trajectory from s_1 (losses left at zero).
  Trajectory rollout(const Policy& policy, RandomStream& rng);

  std::uint64_t calls() const { return calls_; }
  std::uint64_t budget() const { return budget_; }
  const LayeredMdp& mdp() const { return *mdp_; }

 private:
  const LayeredMdp* mdp_;
  std::uint64_t budget_;
  std::uint64_t calls_ = 0;
};

// Runs one real episode from s_1 and records the incurred losses.
Trajectory simulate_episode(const LayeredMdp& mdp, const Policy& policy,
                            std::span<const double> loss, RandomStream& rng,
                            int episode = 0);

}  // namespace advlin

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

#include "advlin/mdp.h"

#include <cmath>
#include <string>

#include "advlin/errors.h"

namespace advlin {

namespace {

constexpr double kRenormTol = 1e-9;
constexpr double kNormTol = 1e-12;

// Validates a probability row and renormalizes float noise away.
Eigen::VectorXd checked_distribution(Eigen::VectorXd row,
                                     const std::string& what) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < row.size(); ++i) {
    if (!std::isfinite(row[i]) || row[i] < 0.0) {
      throw InputError(what + ": entries must be finite and nonnegative");
    }
    sum += row[i];
  }
  if (std::abs(sum - 1.0) > kRenormTol) {
    throw InputError(what + ": row sums to " + std::to_string(sum));
  }
  return row / sum;
}

void check_loss_span(const LayeredMdp& mdp, std::span<const double> loss) {
  if (loss.size() != mdp.num_states() * mdp.num_actions()) {
    throw InputError("loss table has " + std::to_string(loss.size()) +
                     " entries, expected " +
                     std::to_string(mdp.num_states() * mdp.num_actions()));
  }
}

void check_policy(const LayeredMdp& mdp, const Policy& policy) {
  if (policy.num_states() != mdp.num_states() ||
      policy.num_actions() != mdp.num_actions()) {
    throw InputError("policy shape does not match the MDP");
  }
}

// E_{s' ~ P(.|s,a)}[v(s')] for a per-state vector v.
double expected_next(const LayeredMdp& mdp, std::size_t s, int a,
                     const Eigen::VectorXd& v) {
  const Eigen::VectorXd& p = mdp.transition(s, a);
  const std::size_t base = mdp.successor_flat(s, 0);
  return p.dot(v.segment(static_cast<Eigen::Index>(base), p.size()));
}

}  // namespace

LayeredMdp::LayeredMdp(int horizon, int num_actions, int feature_dim,
                       std::vector<int> layer_sizes,
                       std::vector<Eigen::VectorXd> features,
                       std::vector<Eigen::VectorXd> transitions)
    : horizon_(horizon),
      num_actions_(num_actions),
      feature_dim_(feature_dim),
      layer_sizes_(std::move(layer_sizes)),
      features_(std::move(features)) {
  if (horizon_ < 1) throw InputError("horizon must be positive");
  if (num_actions_ < 1) throw InputError("action count must be positive");
  if (feature_dim_ < 1) throw InputError("feature dimension must be positive");
  if (static_cast<int>(layer_sizes_.size()) != horizon_) {
    throw InputError("layer_sizes must have one entry per layer");
  }
  if (layer_sizes_[0] != 1) {
    throw InputError("layer 1 must contain exactly one state");
  }
  offsets_.push_back(0);
  for (int h = 0; h < horizon_; ++h) {
    if (layer_sizes_[h] < 1) throw InputError("layer sizes must be positive");
    offsets_.push_back(offsets_.back() + layer_sizes_[h]);
    for (int i = 0; i < layer_sizes_[h]; ++i) layer_of_.push_back(h + 1);
  }
  const std::size_t pairs = num_states() * num_actions_;
  if (features_.size() != pairs) {
    throw InputError("expected " + std::to_string(pairs) + " feature vectors");
  }
  for (std::size_t i = 0; i < pairs; ++i) {
    const auto& phi = features_[i];
    if (phi.size() != feature_dim_) {
      throw InputError("feature vector has wrong dimension");
    }
    if (!phi.allFinite() || phi.norm() > 1.0 + kNormTol) {
      throw InputError("feature vectors must be finite with norm <= 1");
    }
  }
  const std::size_t inner_pairs = offsets_[horizon_ - 1] * num_actions_;
  if (transitions.size() != inner_pairs) {
    throw InputError("expected " + std::to_string(inner_pairs) +
                     " transition rows");
  }
  transitions_.reserve(inner_pairs);
  for (std::size_t i = 0; i < inner_pairs; ++i) {
    const std::size_t s = i / num_actions_;
    const int next = layer_sizes_[layer_of_[s]];
    if (transitions[i].size() != next) {
      throw InputError("transition row must cover the next layer");
    }
    transitions_.push_back(
        checked_distribution(std::move(transitions[i]), "transition row"));
  }
}

std::size_t LayeredMdp::flat(const StateId& id) const {
  if (id.layer < 1 || id.layer > horizon_ || id.index < 0 ||
      id.index >= layer_sizes_[id.layer - 1]) {
    throw InputError("state id out of range");
  }
  return offsets_[id.layer - 1] + id.index;
}

StateId LayeredMdp::state_id(std::size_t s) const {
  const int layer = layer_of_.at(s);
  return {layer, static_cast<int>(s - offsets_[layer - 1])};
}

Eigen::MatrixXd LayeredMdp::state_features(std::size_t s) const {
  Eigen::MatrixXd out(feature_dim_, num_actions_);
  for (int a = 0; a < num_actions_; ++a) out.col(a) = feature(s, a);
  return out;
}

const Eigen::VectorXd& LayeredMdp::transition(std::size_t s, int a) const {
  if (layer_of_.at(s) >= horizon_) {
    throw LayerBoundaryError("no transition out of the last layer");
  }
  return transitions_[s * num_actions_ + a];
}

LossTable::LossTable(int episodes, std::size_t num_states, int num_actions)
    : LossTable(episodes, num_states, num_actions,
                std::vector<double>(static_cast<std::size_t>(episodes) *
                                        num_states * num_actions,
                                    0.0)) {}

LossTable::LossTable(int episodes, std::size_t num_states, int num_actions,
                     std::vector<double> values)
    : episodes_(episodes),
      num_states_(num_states),
      num_actions_(num_actions),
      values_(std::move(values)) {
  if (episodes_ < 1) throw InputError("loss table needs at least one episode");
  if (values_.size() !=
      static_cast<std::size_t>(episodes_) * num_states_ * num_actions_) {
    throw InputError("loss table size mismatch");
  }
  for (double v : values_) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw InputError("losses must lie in [0, 1]");
    }
  }
}

void LossTable::set(int k, std::size_t s, int a, double v) {
  if (!(v >= 0.0 && v <= 1.0)) throw InputError("losses must lie in [0, 1]");
  values_.at(index(k, s, a)) = v;
}

std::span<const double> LossTable::episode(int k) const {
  if (k < 0 || k >= episodes_) throw InputError("episode out of range");
  const std::size_t stride = num_states_ * num_actions_;
  return {values_.data() + static_cast<std::size_t>(k) * stride, stride};
}

StateActionTable LossTable::total() const {
  StateActionTable t = StateActionTable::Zero(num_states_, num_actions_);
  for (int k = 0; k < episodes_; ++k) t += episode_table(k);
  return t;
}

StateActionTable LossTable::episode_table(int k) const {
  const auto e = episode(k);
  StateActionTable t(num_states_, num_actions_);
  for (std::size_t s = 0; s < num_states_; ++s) {
    for (int a = 0; a < num_actions_; ++a) t(s, a) = e[s * num_actions_ + a];
  }
  return t;
}

Policy::Policy(Eigen::MatrixXd probs) : probs_(std::move(probs)) {
  for (Eigen::Index s = 0; s < probs_.rows(); ++s) {
    probs_.row(s) =
        checked_distribution(probs_.row(s).transpose(), "policy row")
            .transpose();
  }
}

Policy Policy::uniform(const LayeredMdp& mdp) {
  return Policy(Eigen::MatrixXd::Constant(mdp.num_states(), mdp.num_actions(),
                                          1.0 / mdp.num_actions()));
}

Policy Policy::deterministic(const LayeredMdp& mdp,
                             const std::vector<int>& actions) {
  if (actions.size() != mdp.num_states()) {
    throw InputError("need one action per state");
  }
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(mdp.num_states(), mdp.num_actions());
  for (std::size_t s = 0; s < actions.size(); ++s) {
    if (actions[s] < 0 || actions[s] >= mdp.num_actions()) {
      throw InputError("action out of range");
    }
    p(s, actions[s]) = 1.0;
  }
  return Policy(std::move(p));
}

Policy Policy::splice(const LayeredMdp& mdp, const Policy& before,
                      const Policy& after, int switch_layer) {
  Eigen::MatrixXd p = after.matrix();
  for (std::size_t s = 0; s < mdp.num_states(); ++s) {
    if (mdp.layer_of(s) < switch_layer) p.row(s) = before.matrix().row(s);
  }
  return Policy(std::move(p));
}

std::vector<double> Trajectory::suffix_losses() const {
  std::vector<double> out(steps.size(), 0.0);
  double acc = 0.0;
  for (std::size_t i = steps.size(); i-- > 0;) {
    acc += steps[i].loss;
    out[i] = acc;
  }
  return out;
}

double Trajectory::total_loss() const {
  double acc = 0.0;
  for (const auto& st : steps) acc += st.loss;
  return acc;
}

StateActionTable q_values_exact(const LayeredMdp& mdp,
                                std::span<const double> loss,
                                const Policy& policy) {
  check_loss_span(mdp, loss);
  check_policy(mdp, policy);
  const int A = mdp.num_actions();
  StateActionTable q(mdp.num_states(), A);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(mdp.num_states());
  for (int h = mdp.horizon(); h >= 1; --h) {
    for (std::size_t s = mdp.layer_begin(h); s < mdp.layer_end(h); ++s) {
      for (int a = 0; a < A; ++a) {
        double value = loss[s * A + a];
        if (h < mdp.horizon()) value += expected_next(mdp, s, a, v);
        q(s, a) = value;
      }
      v[s] = policy.matrix().row(s).dot(q.row(s));
    }
  }
  return q;
}

double v_value_exact(const LayeredMdp& mdp, std::span<const double> loss,
                     const Policy& policy) {
  const StateActionTable q = q_values_exact(mdp, loss, policy);
  return policy.matrix().row(0).dot(q.row(0));
}

std::vector<double> state_occupancy(const LayeredMdp& mdp,
                                    const Policy& policy) {
  check_policy(mdp, policy);
  std::vector<double> mu(mdp.num_states(), 0.0);
  mu[0] = 1.0;
  for (int h = 1; h < mdp.horizon(); ++h) {
    for (std::size_t s = mdp.layer_begin(h); s < mdp.layer_end(h); ++s) {
      if (mu[s] == 0.0) continue;
      for (int a = 0; a < mdp.num_actions(); ++a) {
        const double w = mu[s] * policy.prob(s, a);
        if (w == 0.0) continue;
        const Eigen::VectorXd& p = mdp.transition(s, a);
        for (Eigen::Index j = 0; j < p.size(); ++j) {
          mu[mdp.successor_flat(s, j)] += w * p[j];
        }
      }
    }
  }
  return mu;
}

Eigen::MatrixXd covariance_exact(const LayeredMdp& mdp, const Policy& policy,
                                 int layer) {
  if (layer < 1 || layer > mdp.horizon()) {
    throw InputError("layer out of range");
  }
  const auto mu = state_occupancy(mdp, policy);
  const int d = mdp.feature_dim();
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(d, d);
  for (std::size_t s = mdp.layer_begin(layer); s < mdp.layer_end(layer); ++s) {
    for (int a = 0; a < mdp.num_actions(); ++a) {
      const double w = mu[s] * policy.prob(s, a);
      if (w == 0.0) continue;
      const auto& phi = mdp.feature(s, a);
      sigma.noalias() += w * phi * phi.transpose();
    }
  }
  return 0.5 * (sigma + sigma.transpose());
}

Eigen::VectorXd feature_loss_moment_exact(const LayeredMdp& mdp,
                                          std::span<const double> loss,
                                          const Policy& policy, int layer) {
  const StateActionTable q = q_values_exact(mdp, loss, policy);
  const auto mu = state_occupancy(mdp, policy);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(mdp.feature_dim());
  for (std::size_t s = mdp.layer_begin(layer); s < mdp.layer_end(layer); ++s) {
    for (int a = 0; a < mdp.num_actions(); ++a) {
      out += mu[s] * policy.prob(s, a) * q(s, a) * mdp.feature(s, a);
    }
  }
  return out;
}

HindsightOptimum optimal_policy_in_hindsight(const LayeredMdp& mdp,
                                             const LossTable& losses) {
  if (losses.num_states() != mdp.num_states() ||
      losses.num_actions() != mdp.num_actions()) {
    throw InputError("loss table shape does not match the MDP");
  }
  const int A = mdp.num_actions();
  const StateActionTable total = losses.total();
  std::vector<int> actions(mdp.num_states(), 0);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(mdp.num_states());
  for (int h = mdp.horizon(); h >= 1; --h) {
    for (std::size_t s = mdp.layer_begin(h); s < mdp.layer_end(h); ++s) {
      double best = 0.0;
      for (int a = 0; a < A; ++a) {
        double value = total(s, a);
        if (h < mdp.horizon()) value += expected_next(mdp, s, a, v);
        if (a == 0 || value < best) {
          best = value;
          actions[s] = a;
        }
      }
      v[s] = best;
    }
  }
  return {Policy::deterministic(mdp, actions), v[0]};
}

Simulator::Simulator(const LayeredMdp& mdp, std::uint64_t budget)
    : mdp_(&mdp), budget_(budget) {}

void Simulator::require(std::uint64_t calls) const {
  if (calls > budget_ - calls_) {
    throw BudgetError("simulator budget exhausted: " + std::to_string(calls_) +
                      " used, " + std::to_string(calls) + " more requested, " +
                      "budget " + std::to_string(budget_));
  }
}

std::size_t Simulator::step(std::size_t s, int a, RandomStream& rng) {
  if (mdp_->layer_of(s) >= mdp_->horizon()) {
    throw LayerBoundaryError("simulator queried at the last layer");
  }
  require(1);
  ++calls_;
  const std::size_t local = rng.categorical(mdp_->transition(s, a));
  return mdp_->successor_flat(s, local);
}

StateId Simulator::step(const StateId& s, int a, RandomStream& rng) {
  return mdp_->state_id(step(mdp_->flat(s), a, rng));
}

Trajectory Simulator::rollout(const Policy& policy, RandomStream& rng) {
  Trajectory traj;
  traj.steps.reserve(mdp_->horizon());
  std::size_t s = mdp_->initial_state();
  for (int h = 1; h <= mdp_->horizon(); ++h) {
    const int a = static_cast<int>(rng.categorical(policy.matrix().row(s).transpose()));
    traj.steps.push_back({s, a, 0.0});
    if (h < mdp_->horizon()) s = step(s, a, rng);
  }
  return traj;
}

Trajectory simulate_episode(const LayeredMdp& mdp, const Policy& policy,
                            std::span<const double> loss, RandomStream& rng,
                            int episode) {
  check_loss_span(mdp, loss);
  check_policy(mdp, policy);
  Trajectory traj;
  traj.episode = episode;
  traj.steps.reserve(mdp.horizon());
  std::size_t s = mdp.initial_state();
  const int A = mdp.num_actions();
  for (int h = 1; h <= mdp.horizon(); ++h) {
    const int a =
        static_cast<int>(rng.categorical(policy.matrix().row(s).transpose()));
    traj.steps.push_back({s, a, loss[s * A + a]});
    if (h < mdp.horizon()) {
      s = mdp.successor_flat(s, rng.categorical(mdp.transition(s, a)));
    }
  }
  return traj;
}

}  // namespace advlin

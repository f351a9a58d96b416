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

#include "advlin/bonuses.h"

#include <algorithm>
#include <cmath>

#include "advlin/errors.h"

namespace advlin {

namespace {

void check_layers(const LayeredMdp& mdp,
                  const std::vector<Eigen::MatrixXd>& cov_inv) {
  if (static_cast<int>(cov_inv.size()) != mdp.horizon()) {
    throw InputError("need one covariance inverse per layer");
  }
  for (const auto& m : cov_inv) {
    if (m.rows() != mdp.feature_dim() || m.cols() != mdp.feature_dim()) {
      throw InputError("covariance inverse has wrong shape");
    }
  }
}

// E_{s'~P(.|s,a), a'~policy}[table(s', a')].
double next_expectation(const LayeredMdp& mdp, const Policy& policy,
                        const StateActionTable& table, std::size_t s, int a) {
  const Eigen::VectorXd& p = mdp.transition(s, a);
  double acc = 0.0;
  for (Eigen::Index j = 0; j < p.size(); ++j) {
    if (p[j] == 0.0) continue;
    const std::size_t t = mdp.successor_flat(s, j);
    acc += p[j] * policy.matrix().row(t).dot(table.row(t));
  }
  return acc;
}

}  // namespace

double bonus_b(const Eigen::MatrixXd& phi_s, int a,
               const Eigen::VectorXd& policy_row, const Eigen::MatrixXd& cov_inv,
               double beta) {
  if (beta < 0.0) throw InputError("beta must be nonnegative");
  if (beta == 0.0) return 0.0;
  // norms[a'] = ||phi(s, a')||^2_S.
  const Eigen::VectorXd norms =
      (phi_s.array() * (cov_inv * phi_s).array()).colwise().sum().transpose();
  const double v = beta * (norms[a] + policy_row.dot(norms));
  return std::max(0.0, v);
}

StateActionTable bonus_table(const LayeredMdp& mdp, const Policy& policy,
                             const std::vector<Eigen::MatrixXd>& cov_inv,
                             double beta, const std::vector<bool>& known) {
  check_layers(mdp, cov_inv);
  if (!known.empty() && known.size() != mdp.num_states()) {
    throw InputError("known-set mask has wrong size");
  }
  const int A = mdp.num_actions();
  StateActionTable b = StateActionTable::Zero(mdp.num_states(), A);
  if (beta == 0.0) return b;
  for (std::size_t s = 0; s < mdp.num_states(); ++s) {
    if (!known.empty() && !known[s]) continue;
    const Eigen::MatrixXd phi_s = mdp.state_features(s);
    const Eigen::MatrixXd& S = cov_inv[mdp.layer_of(s) - 1];
    const Eigen::VectorXd norms =
        (phi_s.array() * (S * phi_s).array()).colwise().sum().transpose();
    const double mean = policy.matrix().row(s).dot(norms);
    for (int a = 0; a < A; ++a) b(s, a) = std::max(0.0, beta * (norms[a] + mean));
  }
  return b;
}

StateActionTable dilated_bonus_exact(const LayeredMdp& mdp,
                                     const Policy& policy,
                                     const StateActionTable& b) {
  const int A = mdp.num_actions();
  const int H = mdp.horizon();
  const double dilation = 1.0 + 1.0 / H;
  StateActionTable B(mdp.num_states(), A);
  for (int h = H; h >= 1; --h) {
    for (std::size_t s = mdp.layer_begin(h); s < mdp.layer_end(h); ++s) {
      for (int a = 0; a < A; ++a) {
        B(s, a) = b(s, a);
        if (h < H) B(s, a) += dilation * next_expectation(mdp, policy, B, s, a);
      }
    }
  }
  return B;
}

double dilated_bonus_residual(const LayeredMdp& mdp, const Policy& policy,
                              const StateActionTable& b,
                              const StateActionTable& B) {
  const int H = mdp.horizon();
  const double dilation = 1.0 + 1.0 / H;
  double worst = 0.0;
  for (std::size_t s = 0; s < mdp.num_states(); ++s) {
    for (int a = 0; a < mdp.num_actions(); ++a) {
      double rhs = b(s, a);
      if (mdp.layer_of(s) < H) {
        rhs += dilation * next_expectation(mdp, policy, B, s, a);
      }
      worst = std::max(worst, std::abs(B(s, a) - rhs));
    }
  }
  return worst;
}

DilatedBonusCache::DilatedBonusCache(Simulator& sim, const Policy& policy,
                                     const StateActionTable& b, int episode)
    : sim_(&sim),
      policy_(&policy),
      b_(&b),
      episode_(episode),
      pt_(policy.matrix().transpose()),
      memo_(sim.mdp().num_states() * sim.mdp().num_actions(), 0.0),
      has_(memo_.size(), 0) {
  if (b.rows() != static_cast<Eigen::Index>(sim.mdp().num_states()) ||
      b.cols() != sim.mdp().num_actions()) {
    throw InputError("bonus table shape does not match the MDP");
  }
}

double DilatedBonusCache::query(std::size_t s, int a, RandomStream& rng) {
  const LayeredMdp& mdp = sim_->mdp();
  const int A = mdp.num_actions();
  const int H = mdp.horizon();
  // Iterative form of the recursion: walk forward drawing one (s', a') per
  // unmemoized pair, then fill values backward.
  std::vector<std::pair<std::size_t, int>> path;
  std::size_t cur_s = s;
  int cur_a = a;
  double tail = 0.0;
  while (true) {
    const std::size_t key = cur_s * A + cur_a;
    if (has_[key]) {
      tail = memo_[key];
      break;
    }
    path.emplace_back(cur_s, cur_a);
    if (mdp.layer_of(cur_s) == H) {
      tail = 0.0;
      break;
    }
    const std::size_t next = sim_->step(cur_s, cur_a, rng);
    ++calls_;
    cur_a = static_cast<int>(rng.categorical(pt_.col(next)));
    cur_s = next;
  }
  const double dilation = 1.0 + 1.0 / H;
  for (std::size_t i = path.size(); i-- > 0;) {
    const auto [ps, pa] = path[i];
    const bool terminal = mdp.layer_of(ps) == H;
    const double v = (*b_)(ps, pa) + (terminal ? 0.0 : dilation * tail);
    memo_[ps * A + pa] = v;
    has_[ps * A + pa] = 1;
    ++filled_;
    tail = v;
  }
  return tail;
}

double kernel_weight(const EpochSample& e, int h, int H) {
  if (!e.explore) return 1.0;
  return h == e.switch_layer ? static_cast<double>(H) : 0.0;
}

namespace {

template <typename Target>
std::vector<Eigen::VectorXd> weighted_kernel(
    const LayeredMdp& mdp, const std::vector<EpochSample>& samples,
    const std::vector<Eigen::MatrixXd>& cov_inv, Target target) {
  check_layers(mdp, cov_inv);
  if (samples.empty()) throw InputError("kernel estimate needs samples");
  const int H = mdp.horizon();
  const int d = mdp.feature_dim();
  std::vector<Eigen::VectorXd> acc(H, Eigen::VectorXd::Zero(d));
  for (const auto& e : samples) {
    if (static_cast<int>(e.trajectory.steps.size()) != H) {
      throw InputError("trajectory length must equal H");
    }
    for (int h = 1; h <= H; ++h) {
      const double w = kernel_weight(e, h, H);
      if (w == 0.0) continue;
      const Step& st = e.trajectory.steps[h - 1];
      const double t = target(e.trajectory, h);
      if (t == 0.0) continue;
      acc[h - 1] += (w * t) * mdp.feature(st.state, st.action);
    }
  }
  const double n = static_cast<double>(samples.size());
  std::vector<Eigen::VectorXd> out;
  for (int h = 0; h < H; ++h) out.push_back(cov_inv[h] * (acc[h] / n));
  return out;
}

}  // namespace

std::vector<Eigen::VectorXd> estimate_bonus_kernel(
    const LayeredMdp& mdp, const std::vector<EpochSample>& samples,
    const StateActionTable& b, const std::vector<Eigen::MatrixXd>& cov_inv) {
  const int H = mdp.horizon();
  const double dilation = 1.0 + 1.0 / H;
  return weighted_kernel(
      mdp, samples, cov_inv, [&](const Trajectory& traj, int h) {
        double dsum = 0.0;
        double factor = 1.0;
        for (int hp = h + 1; hp <= H; ++hp) {
          factor *= dilation;
          const Step& st = traj.steps[hp - 1];
          dsum += factor * b(st.state, st.action);
        }
        return dsum;
      });
}

std::vector<Eigen::VectorXd> estimate_q_kernel(
    const LayeredMdp& mdp, const std::vector<EpochSample>& samples,
    const std::vector<Eigen::MatrixXd>& cov_inv) {
  return weighted_kernel(mdp, samples, cov_inv,
                         [](const Trajectory& traj, int h) {
                           double L = 0.0;
                           for (std::size_t i = h - 1; i < traj.steps.size();
                                ++i) {
                             L += traj.steps[i].loss;
                           }
                           return L;
                         });
}

}  // namespace advlin

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

#include "advlin/policy_cover.h"

#include <algorithm>
#include <cmath>

#include "advlin/errors.h"
#include "advlin/linalg.h"

namespace advlin {

double ramp(double z, double y) {
  if (!(z > 0.0)) throw InputError("ramp width must be positive");
  if (y <= -z) return 0.0;
  if (y >= 0.0) return 1.0;
  return y / z + 1.0;
}

double default_beta_tilde(int d, int H, long long K, double delta) {
  return 60.0 * d * H * std::sqrt(std::log(static_cast<double>(K) / delta));
}

std::vector<bool> known_states(const LayeredMdp& mdp,
                               const std::vector<Eigen::MatrixXd>& sigma_cov,
                               double alpha) {
  if (static_cast<int>(sigma_cov.size()) != mdp.horizon()) {
    throw InputError("need one cover covariance per layer");
  }
  std::vector<Eigen::MatrixXd> inv;
  for (const auto& s : sigma_cov) inv.push_back(linalg::spd_inverse(s));
  std::vector<bool> known(mdp.num_states(), true);
  for (std::size_t s = 0; s < mdp.num_states(); ++s) {
    const Eigen::MatrixXd& g = inv[mdp.layer_of(s) - 1];
    for (int a = 0; a < mdp.num_actions(); ++a) {
      const auto& phi = mdp.feature(s, a);
      if (linalg::quad(phi, g, phi) > alpha) {
        known[s] = false;
        break;
      }
    }
  }
  return known;
}

double mixture_value(const LayeredMdp& mdp, std::span<const double> loss,
                     const std::vector<Policy>& components) {
  if (components.empty()) throw InputError("empty mixture");
  double v = 0.0;
  for (const auto& p : components) v += v_value_exact(mdp, loss, p);
  return v / static_cast<double>(components.size());
}

PolicyCoverResult run_policy_cover(const LayeredMdp& mdp,
                                   const PolicyCoverParams& params,
                                   RandomStream& rng, const LossTable* losses,
                                   int first_episode) {
  if (params.M0 < 1 || params.N0 < 1) {
    throw InputError("policy cover needs M0, N0 >= 1");
  }
  if (!(params.alpha > 0.0) || !(params.delta > 0.0) || params.K < 1) {
    throw InputError("policy cover needs alpha, delta > 0 and K >= 1");
  }
  if (losses != nullptr &&
      first_episode + params.M0 * params.N0 > losses->episodes()) {
    throw InputError("policy cover runs past the loss table");
  }
  const int H = mdp.horizon();
  const int d = mdp.feature_dim();
  const int A = mdp.num_actions();
  const double width = 1.0 / static_cast<double>(params.K);
  const double shift = params.alpha / static_cast<double>(params.M0);

  PolicyCoverResult out;
  out.beta_tilde = params.beta_tilde > 0.0
                       ? params.beta_tilde
                       : default_beta_tilde(d, H, params.K, params.delta);
  std::vector<Eigen::MatrixXd> gamma(H, Eigen::MatrixXd::Identity(d, d));
  // Data for the regression targets: (state, action, next state) per layer.
  struct Transition {
    std::size_t s;
    int a;
    std::size_t next;
  };
  std::vector<std::vector<Transition>> data(H);
  const std::vector<double> zero_loss(mdp.num_states() * A, 0.0);

  for (long long m = 0; m < params.M0; ++m) {
    std::vector<double> v(mdp.num_states(), 0.0);
    std::vector<int> greedy(mdp.num_states(), 0);
    for (int h = H; h >= 1; --h) {
      const Eigen::MatrixXd ginv = linalg::spd_inverse(gamma[h - 1]);
      Eigen::VectorXd target = Eigen::VectorXd::Zero(d);
      if (h < H) {
        for (const auto& t : data[h - 1]) {
          target += v[t.next] * mdp.feature(t.s, t.a);
        }
        target /= static_cast<double>(params.N0);
      }
      const Eigen::VectorXd theta = ginv * target;
      for (std::size_t s = mdp.layer_begin(h); s < mdp.layer_end(h); ++s) {
        double best = 0.0;
        for (int a = 0; a < A; ++a) {
          const auto& phi = mdp.feature(s, a);
          const double norm = std::sqrt(std::max(0.0, linalg::quad(phi, ginv, phi)));
          const double r = ramp(width, norm - shift);
          const double q =
              std::min(r + out.beta_tilde * norm + phi.dot(theta),
                       static_cast<double>(H));
          if (a == 0 || q > best) {
            best = q;
            greedy[s] = a;
          }
        }
        v[s] = best;
      }
    }
    Policy pi = Policy::deterministic(mdp, greedy);

    std::vector<Eigen::MatrixXd> update(H, Eigen::MatrixXd::Zero(d, d));
    for (long long n = 0; n < params.N0; ++n) {
      const int index = static_cast<int>(m * params.N0 + n);
      RandomStream ep = rng.fork("cover_episode", static_cast<std::uint64_t>(index));
      std::span<const double> loss =
          losses != nullptr ? losses->episode(first_episode + index)
                            : std::span<const double>(zero_loss);
      Trajectory traj = simulate_episode(mdp, pi, loss, ep, first_episode + index);
      for (int h = 1; h <= H; ++h) {
        const Step& st = traj.steps[h - 1];
        const auto& phi = mdp.feature(st.state, st.action);
        update[h - 1].noalias() += phi * phi.transpose();
        if (h < H) {
          data[h - 1].push_back({st.state, st.action, traj.steps[h].state});
        }
      }
      out.episodes.push_back(std::move(traj));
      out.component_of.push_back(static_cast<int>(m));
    }
    for (int h = 0; h < H; ++h) {
      gamma[h] += update[h] / static_cast<double>(params.N0);
    }
    out.components.push_back(std::move(pi));
  }
  for (int h = 0; h < H; ++h) {
    out.sigma_cov.push_back(
        linalg::symmetrize(gamma[h] / static_cast<double>(params.M0)));
  }
  out.known = known_states(mdp, out.sigma_cov, params.alpha);
  return out;
}

}  // namespace advlin

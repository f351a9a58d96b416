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

#include <algorithm>
#include <numeric>
#include <string>

#include "advlin/algorithms.h"
#include "advlin/bonuses.h"
#include "advlin/errors.h"
#include "advlin/estimators.h"

namespace advlin {

namespace {

enum class Mode { kEpochPolicy, kCover, kSpliced };

}  // namespace

RunResult run_alg6_linear_mdp(const LayeredMdp& mdp, const LossTable& losses,
                              const ResolvedParams& p, RandomStream& rng,
                              const RunOptions& opt) {
  if (losses.num_states() != mdp.num_states() ||
      losses.num_actions() != mdp.num_actions()) {
    throw InputError("loss table shape does not match the MDP");
  }
  const int K = losses.episodes();
  const int H = mdp.horizon();
  const int A = mdp.num_actions();
  const std::size_t S = mdp.num_states();
  const long long K0 = p.M0 * p.N0;
  if (K0 > K) throw InputError("policy cover needs more episodes than K");
  if (p.W < 2 || p.W % 2 != 0) throw InputError("epoch length W must be even");
  if ((K - K0) % p.W != 0) {
    throw InputError("K - K0 = " + std::to_string(K - K0) +
                     " is not divisible by W = " + std::to_string(p.W));
  }
  std::optional<HindsightOptimum> best;
  if (opt.comparator == nullptr) best = optimal_policy_in_hindsight(mdp, losses);
  const Policy& star = opt.comparator != nullptr ? *opt.comparator : best->policy;

  // The learner never gets simulator access; this one only guards that.
  Simulator sim(mdp, 0);

  RunResult out;
  for (const auto& v : p.violations) {
    out.log.push_back("condition violated: " + v.name + " (" +
                      std::to_string(v.lhs) + " vs " + std::to_string(v.rhs) +
                      ")");
  }
  for (const auto& d : p.deficits) {
    out.log.push_back("count capped: " + d.name + " uses " +
                      std::to_string(d.used) + " of " +
                      std::to_string(d.theoretical));
  }

  PolicyCoverParams pc;
  pc.M0 = p.M0;
  pc.N0 = p.N0;
  pc.alpha = p.alpha;
  pc.delta = p.delta;
  pc.K = K;
  RandomStream cover_rng = rng.fork("cover");
  PolicyCoverResult cover = run_policy_cover(mdp, pc, cover_rng, &losses, 0);
  const std::vector<Policy>& comps = cover.components;

  double regret = 0.0;
  for (int k = 0; k < K0; ++k) {
    const auto loss = losses.episode(k);
    EpisodeRecord rec;
    rec.k = k + 1;
    rec.learner_value = v_value_exact(mdp, loss, comps[cover.component_of[k]]);
    rec.optimal_value = v_value_exact(mdp, loss, star);
    regret += rec.learner_value - rec.optimal_value;
    rec.cumulative_regret = regret;
    rec.flags = kFlagPolicyCover;
    rec.realized_loss = cover.episodes[k].total_loss();
    out.trace.push_back(rec);
    if (opt.keep_policies) out.policies.push_back(comps[cover.component_of[k]]);
  }

  StateActionTable cum = StateActionTable::Zero(S, A);
  const long long J = (K - K0) / p.W;
  const long long half = p.W / 2;
  for (long long j = 0; j < J; ++j) {
    RandomStream er = rng.fork("epoch", static_cast<std::uint64_t>(j));
    const Policy pi = logbarrier_policy(cum, p.eta);
    const int first = static_cast<int>(K0 + j * p.W);

    // in_cov[i] marks episode first + i as a member of T_j.
    std::vector<long long> order(static_cast<std::size_t>(p.W));
    std::iota(order.begin(), order.end(), 0);
    RandomStream perm = er.fork("halves");
    std::shuffle(order.begin(), order.end(), perm);
    std::vector<char> in_cov(order.size(), 0);
    for (long long i = 0; i < half; ++i) in_cov[order[i]] = 1;

    std::vector<std::vector<Eigen::VectorXd>> layer_features(H);
    std::vector<EpochSample> kernel_samples;
    const std::size_t epoch_start = out.trace.size();
    for (long long i = 0; i < p.W; ++i) {
      const int k = first + static_cast<int>(i);
      RandomStream ek = rng.fork("episode", static_cast<std::uint64_t>(k));
      const auto loss = losses.episode(k);
      EpochSample sample;
      sample.explore = ek.bernoulli(p.delta_e);
      Mode mode = Mode::kEpochPolicy;
      if (sample.explore) mode = in_cov[i] ? Mode::kCover : Mode::kSpliced;

      EpisodeRecord rec;
      rec.k = k + 1;
      if (sample.explore) rec.flags |= kFlagExploration;
      const std::size_t m = ek.uniform_index(comps.size());
      switch (mode) {
        case Mode::kEpochPolicy:
          rec.learner_value = v_value_exact(mdp, loss, pi);
          sample.trajectory = simulate_episode(mdp, pi, loss, ek, k + 1);
          break;
        case Mode::kCover:
          rec.learner_value = mixture_value(mdp, loss, comps);
          sample.trajectory = simulate_episode(mdp, comps[m], loss, ek, k + 1);
          break;
        case Mode::kSpliced: {
          double v = 0.0;
          for (int h = 1; h <= H; ++h) {
            for (const auto& c : comps) {
              v += v_value_exact(mdp, loss, Policy::splice(mdp, c, pi, h));
            }
          }
          rec.learner_value = v / static_cast<double>(H * comps.size());
          sample.switch_layer = 1 + static_cast<int>(ek.uniform_index(H));
          const Policy run =
              Policy::splice(mdp, comps[m], pi, sample.switch_layer);
          sample.trajectory = simulate_episode(mdp, run, loss, ek, k + 1);
          break;
        }
      }
      rec.optimal_value = v_value_exact(mdp, loss, star);
      regret += rec.learner_value - rec.optimal_value;
      rec.cumulative_regret = regret;
      rec.realized_loss = sample.trajectory.total_loss();
      out.trace.push_back(rec);

      if (in_cov[i]) {
        for (int h = 1; h <= H; ++h) {
          const Step& st = sample.trajectory.steps[h - 1];
          layer_features[h - 1].push_back(mdp.feature(st.state, st.action));
        }
      } else {
        kernel_samples.push_back(std::move(sample));
      }
    }
    out.epoch_halves.push_back(
        {static_cast<int>(layer_features[0].size()),
         static_cast<int>(kernel_samples.size())});

    std::vector<Eigen::MatrixXd> cov(H);
    for (int h = 0; h < H; ++h) {
      cov[h] = empirical_cov_inverse(layer_features[h], p.gamma).matrix;
    }
    const StateActionTable b = bonus_table(mdp, pi, cov, p.beta, cover.known);
    const int above = static_cast<int>((b.array() > 1.0).count());
    if (above > 0) {
      out.bonus_violations += above;
      for (std::size_t r = epoch_start; r < out.trace.size(); ++r) {
        out.trace[r].flags |= kFlagBonusAboveOne;
      }
    }
    const auto theta = estimate_q_kernel(mdp, kernel_samples, cov);
    const auto lambda = estimate_bonus_kernel(mdp, kernel_samples, b, cov);
    for (std::size_t s = 0; s < S; ++s) {
      const int h = mdp.layer_of(s);
      for (int a = 0; a < A; ++a) {
        const Eigen::VectorXd& phi = mdp.feature(s, a);
        cum(s, a) += phi.dot(theta[h - 1]) - (b(s, a) + phi.dot(lambda[h - 1]));
      }
    }
    if (opt.keep_policies) {
      for (long long i = 0; i < p.W; ++i) out.policies.push_back(pi);
    }
  }

  if (sim.calls() != 0) {
    throw InvariantError("simulator-free learner made simulator calls");
  }
  if (out.bonus_violations > 0) {
    out.log.push_back("bonus above one at " +
                      std::to_string(out.bonus_violations) + " (s, a) entries");
  }
  out.simulator_calls = 0;
  out.cover = std::move(cover);
  return out;
}

}  // namespace advlin

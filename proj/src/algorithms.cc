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

#include "advlin/algorithms.h"

#include <string>

#include "advlin/bonuses.h"
#include "advlin/errors.h"
#include "advlin/estimators.h"
#include "advlin/ftrl.h"

namespace advlin {

namespace {

enum class Variant { kLogBarrier, kMagReduced, kBaseline };

void check_shapes(const LayeredMdp& mdp, const LossTable& losses) {
  if (losses.num_states() != mdp.num_states() ||
      losses.num_actions() != mdp.num_actions()) {
    throw InputError("loss table shape does not match the MDP");
  }
}

// Features of M simulated trajectories, one d x M matrix per layer.
std::vector<Eigen::MatrixXd> sample_features(Simulator& sim,
                                             const Policy& policy, long long M,
                                             RandomStream& rng) {
  const LayeredMdp& mdp = sim.mdp();
  const int H = mdp.horizon();
  sim.require(static_cast<std::uint64_t>(M) * static_cast<std::uint64_t>(H - 1));
  const Eigen::MatrixXd pt = policy.matrix().transpose();
  std::vector<Eigen::MatrixXd> out(
      H, Eigen::MatrixXd(mdp.feature_dim(), static_cast<Eigen::Index>(M)));
  for (long long m = 0; m < M; ++m) {
    std::size_t s = mdp.initial_state();
    for (int h = 0; h < H; ++h) {
      const int a = static_cast<int>(rng.categorical(pt.col(s)));
      out[h].col(static_cast<Eigen::Index>(m)) = mdp.feature(s, a);
      if (h + 1 < H) s = sim.step(s, a, rng);
    }
  }
  return out;
}

void log_params(const ResolvedParams& p, RunResult& out) {
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
}

RunResult run_linear_q(const LayeredMdp& mdp, const LossTable& losses,
                       const ResolvedParams& p, RandomStream& rng,
                       const RunOptions& opt, Variant variant) {
  check_shapes(mdp, losses);
  const int K = losses.episodes();
  const int H = mdp.horizon();
  const int A = mdp.num_actions();
  const std::size_t S = mdp.num_states();
  std::optional<HindsightOptimum> best;
  if (opt.comparator == nullptr) best = optimal_policy_in_hindsight(mdp, losses);
  const Policy& star = opt.comparator != nullptr ? *opt.comparator : best->policy;

  Simulator sim(mdp, p.simulator_budget == 0 ? Simulator::kUnlimited
                                             : p.simulator_budget);
  MgrParams mgr;
  mgr.gamma = p.gamma;
  mgr.epsilon = p.epsilon;
  mgr.M = p.mgr_M;
  mgr.N = p.mgr_N;

  RunResult out;
  log_params(p, out);
  StateActionTable cum = StateActionTable::Zero(S, A);
  StateActionTable qhat(S, A);
  StateActionTable bonus(S, A);
  double regret = 0.0;
  for (int k = 0; k < K; ++k) {
    RandomStream ek = rng.fork("episode", static_cast<std::uint64_t>(k));
    const Policy pi = variant == Variant::kLogBarrier
                          ? logbarrier_policy(cum, p.eta)
                          : hedge_policy(cum, p.eta);
    const auto loss = losses.episode(k);
    EpisodeRecord rec;
    rec.k = k + 1;
    rec.learner_value = v_value_exact(mdp, loss, pi);
    rec.optimal_value = v_value_exact(mdp, loss, star);
    regret += rec.learner_value - rec.optimal_value;
    rec.cumulative_regret = regret;

    RandomStream real = ek.fork("real");
    const Trajectory traj = simulate_episode(mdp, pi, loss, real, k + 1);
    rec.realized_loss = traj.total_loss();
    const std::vector<double> suffix = traj.suffix_losses();
    const std::uint64_t calls_before = sim.calls();

    MgrResult est;
    std::vector<Eigen::MatrixXd> samples;
    if (variant == Variant::kMagReduced) {
      // Redo the resampling until the extra samples agree with the estimate.
      for (int attempt = 0;; ++attempt) {
        RandomStream mr = ek.fork("mgr", static_cast<std::uint64_t>(attempt));
        est = mgr_estimate(sim, pi, mgr, mr);
        RandomStream sr = ek.fork("samples", static_cast<std::uint64_t>(attempt));
        samples = sample_features(sim, pi, p.M, sr);
        bool ok = true;
        for (int h = 0; h < H && ok; ++h) {
          ok = resampling_check(est.layers[h].matrix,
                                empirical_covariance(samples[h]));
        }
        if (ok) break;
        if (attempt + 1 > opt.retry_cap) {
          throw BudgetError("resampling check failed " +
                            std::to_string(attempt + 1) + " times in episode " +
                            std::to_string(k + 1));
        }
        ++rec.retries;
      }
    } else {
      RandomStream mr = ek.fork("mgr");
      est = mgr_estimate(sim, pi, mgr, mr);
    }
    if (est.any_projected) {
      rec.flags |= kFlagPsdProjection;
      ++out.psd_projections;
    }

    std::vector<Eigen::MatrixXd> cov(H);
    for (int h = 0; h < H; ++h) cov[h] = est.layers[h].matrix;
    for (int h = 1; h <= H; ++h) {
      const Step& st = traj.steps[h - 1];
      const Eigen::VectorXd w = cov[h - 1] * mdp.feature(st.state, st.action);
      const double L = suffix[h - 1];
      // Rows of samples^T S, used for m_k.
      Eigen::MatrixXd zm;
      if (variant == Variant::kMagReduced) {
        zm = samples[h - 1].transpose() * cov[h - 1];
      }
      for (std::size_t s = mdp.layer_begin(h); s < mdp.layer_end(h); ++s) {
        for (int a = 0; a < A; ++a) {
          const Eigen::VectorXd& phi = mdp.feature(s, a);
          const double z = phi.dot(w);
          if (variant == Variant::kMagReduced) {
            const double m_k = (zm * phi).array().min(0.0).mean();
            qhat(s, a) = magnitude_reduced_from_parts(z, L, H, m_k).value;
          } else {
            qhat(s, a) = z * L;
          }
        }
      }
    }

    const StateActionTable b = bonus_table(mdp, pi, cov, p.beta);
    DilatedBonusCache cache(sim, pi, b, k + 1);
    RandomStream br = ek.fork("bonus");
    for (std::size_t s = 0; s < S; ++s) {
      for (int a = 0; a < A; ++a) bonus(s, a) = cache.query(s, a, br);
    }

    const StateActionTable step = qhat - bonus;
    if (variant != Variant::kLogBarrier && (p.eta * step).minCoeff() < -1.0) {
      rec.flags |= kFlagHedgeViolation;
      ++out.hedge_violations;
    }
    cum += step;
    rec.simulator_calls = sim.calls() - calls_before;
    out.total_retries += rec.retries;
    out.trace.push_back(rec);
    if (opt.keep_policies) out.policies.push_back(pi);
  }
  out.simulator_calls = sim.calls();
  if (out.hedge_violations > 0) {
    out.log.push_back("hedge precondition violated in " +
                      std::to_string(out.hedge_violations) + " episodes");
  }
  return out;
}

}  // namespace

Policy logbarrier_policy(const StateActionTable& cum, double eta) {
  Eigen::MatrixXd probs(cum.rows(), cum.cols());
  for (Eigen::Index s = 0; s < cum.rows(); ++s) {
    probs.row(s) = ftrl::logbarrier_step(cum.row(s).transpose(), eta).transpose();
  }
  return Policy(std::move(probs));
}

Policy hedge_policy(const StateActionTable& cum, double eta) {
  Eigen::MatrixXd probs(cum.rows(), cum.cols());
  for (Eigen::Index s = 0; s < cum.rows(); ++s) {
    probs.row(s) = ftrl::hedge_step(cum.row(s).transpose(), eta).transpose();
  }
  return Policy(std::move(probs));
}

RunResult run_alg1_logbarrier(const LayeredMdp& mdp, const LossTable& losses,
                              const ResolvedParams& params, RandomStream& rng,
                              const RunOptions& options) {
  return run_linear_q(mdp, losses, params, rng, options, Variant::kLogBarrier);
}

RunResult run_alg2_magreduced(const LayeredMdp& mdp, const LossTable& losses,
                              const ResolvedParams& params, RandomStream& rng,
                              const RunOptions& options) {
  return run_linear_q(mdp, losses, params, rng, options, Variant::kMagReduced);
}

RunResult run_baseline_hedge(const LayeredMdp& mdp, const LossTable& losses,
                             const ResolvedParams& params, RandomStream& rng,
                             const RunOptions& options) {
  return run_linear_q(mdp, losses, params, rng, options, Variant::kBaseline);
}

RunResult run_algorithm(const LayeredMdp& mdp, const LossTable& losses,
                        const ResolvedParams& params, RandomStream& rng,
                        const RunOptions& options) {
  switch (params.algo) {
    case Algo::kLogBarrier:
      return run_alg1_logbarrier(mdp, losses, params, rng, options);
    case Algo::kMagReduced:
      return run_alg2_magreduced(mdp, losses, params, rng, options);
    case Algo::kBaseline:
      return run_baseline_hedge(mdp, losses, params, rng, options);
    case Algo::kLinMdp:
      return run_alg6_linear_mdp(mdp, losses, params, rng, options);
  }
  throw InputError("unknown algorithm");
}

}  // namespace advlin

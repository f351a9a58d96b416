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

#include "advlin/mdp.h"
#include "advlin/params.h"
#include "advlin/policy_cover.h"
#include "advlin/rng.h"

namespace advlin {

// Bits of EpisodeRecord::flags.
enum ConditionFlag : std::uint32_t {
  kFlagHedgeViolation = 1,   // eta (Q_hat - B) < -1 somewhere this episode
  kFlagBonusAboveOne = 2,    // simulator-free learner: some b_j(s, a) > 1
  kFlagPsdProjection = 4,    // an MGR estimate was projected onto the PSD cone
  kFlagExploration = 8,      // Y_k = 1
  kFlagPolicyCover = 16,     // episode spent inside the policy cover
};

struct EpisodeRecord {
  int k = 1;  // 1-based
  double learner_value = 0.0;
  double optimal_value = 0.0;
  double cumulative_regret = 0.0;
  std::uint64_t simulator_calls = 0;
  int retries = 0;
  std::uint32_t flags = 0;
  double realized_loss = 0.0;
};

struct RunResult {
  std::vector<EpisodeRecord> trace;
  std::uint64_t simulator_calls = 0;
  int total_retries = 0;
  int hedge_violations = 0;   // episodes with the hedge flag
  int bonus_violations = 0;   // (s, a) entries with b > 1, summed over epochs
  int psd_projections = 0;    // episodes with a projected estimate
  std::vector<std::string> log;
  // Filled when RunOptions::keep_policies is set: one policy per episode.
  std::vector<Policy> policies;
  // Simulator-free learner only.
  std::optional<PolicyCoverResult> cover;
  std::vector<std::vector<int>> epoch_halves;  // |T_j| per epoch, then |T_j'|
};

struct RunOptions {
  bool keep_policies = false;
  // Comparator for the regret; computed from the losses when absent.
  const Policy* comparator = nullptr;
  int retry_cap = 50;
};

RunResult run_alg1_logbarrier(const LayeredMdp& mdp, const LossTable& losses,
                              const ResolvedParams& params, RandomStream& rng,
                              const RunOptions& options = {});
RunResult run_alg2_magreduced(const LayeredMdp& mdp, const LossTable& losses,
                              const ResolvedParams& params, RandomStream& rng,
                              const RunOptions& options = {});
RunResult run_baseline_hedge(const LayeredMdp& mdp, const LossTable& losses,
                             const ResolvedParams& params, RandomStream& rng,
                             const RunOptions& options = {});
// No simulator access: the run owns a zero-budget simulator and asserts that
// it was never called.
RunResult run_alg6_linear_mdp(const LayeredMdp& mdp, const LossTable& losses,
                              const ResolvedParams& params, RandomStream& rng,
                              const RunOptions& options = {});

RunResult run_algorithm(const LayeredMdp& mdp, const LossTable& losses,
                        const ResolvedParams& params, RandomStream& rng,
                        const RunOptions& options = {});

// Per-state FTRL over a cumulative (S x A) loss table.
Policy logbarrier_policy(const StateActionTable& cum, double eta);
Policy hedge_policy(const StateActionTable& cum, double eta);

}  // namespace advlin

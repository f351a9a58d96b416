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
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "advlin/algorithms.h"
#include "advlin/env_gen.h"
#include "advlin/params.h"

namespace advlin {

inline constexpr const char* kTraceHeader =
    "k,learner_value,optimal_value,cumulative_regret,simulator_calls,retries,"
    "condition_flags";
inline constexpr const char* kSummaryHeader = "K,seed,final_regret";
inline constexpr const char* kCheckHeader = "trial,quantity,bound,observed,holds";

// Settings for the check-estimators and check-covariance subcommands.
struct CheckSettings {
  int trials = 20;
  double gamma = 0.2;
  double epsilon = 0.1;
  double delta = 0.05;
  // Horizon in the strict MGR count; the checks estimate one matrix, so 1.
  long long T = 1;
  // Overrides for the MGR counts; strict values when absent.
  std::optional<long long> mgr_M, mgr_N;
  // Epoch length for the covariance sandwich; 4 d ln(d/delta) / gamma^2 when
  // absent.
  std::optional<long long> W;
  // Resamples per trial for the estimator checks.
  int resamples = 2000;
};

struct ExperimentConfig {
  EnvSpec env;
  LossSpec loss;
  Algo algo = Algo::kLogBarrier;
  int K = 1;
  ParamOverrides params;
  std::vector<std::uint64_t> seeds;
  std::string output = "out";
  bool log_realized = false;
  CheckSettings checks;
};

// Field paths in ConfigError messages look like "env.layer_sizes[1]".
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::string& path);

/// Generated environment and losses for one (seed, K).
struct Instance {
  LayeredMdp mdp;
  LossTable losses;
  std::uint64_t clipped = 0;
};
// Env from the env seed (or `seed`), losses from the loss seed (or `seed`)
// on a stream keyed by K, so every grid point gets fresh losses.
Instance make_instance(const ExperimentConfig& config, std::uint64_t seed,
                       int K);

// Runs the configured algorithm on one seed at horizon K.
RunResult run_seed(const ExperimentConfig& config, std::uint64_t seed, int K);

// %.17g.
std::string format_double(double x);
void write_trace_csv(std::ostream& out, const RunResult& result,
                     bool log_realized);

struct SeedOutcome {
  std::uint64_t seed = 0;
  std::string trace_path;
  double final_regret = 0.0;
  RunResult result;
};

// Writes trace_seed<N>.csv per seed and resolved_config.json into out_dir.
std::vector<SeedOutcome> run_experiment(const ExperimentConfig& config,
                                        const std::string& out_dir);

struct SummaryRow {
  int K = 0;
  std::uint64_t seed = 0;
  double final_regret = 0.0;
};

// Runs every (K, seed) pair and writes summary.csv into out_dir. `diagnostics`
// receives soft-check messages (e.g. non-monotone mean regret).
std::vector<SummaryRow> sweep(const ExperimentConfig& config,
                              const std::vector<int>& k_grid,
                              const std::string& out_dir,
                              std::vector<std::string>* diagnostics = nullptr);
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);
std::vector<SummaryRow> read_summary_csv(std::istream& in);

struct ScalingFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};
// OLS of ln(mean final regret) on ln K. Needs >= 3 distinct K and a
// positive mean at every K; otherwise DomainError.
ScalingFit fit_scaling_exponent(const std::vector<SummaryRow>& rows);

// "256,1024,4096" -> {256, 1024, 4096}.
std::vector<int> parse_k_grid(const std::string& text);

// Worker count: ADV_LINMDP_THREADS if set and positive, else the hardware
// concurrency, never more than `jobs`.
int worker_count(std::size_t jobs);
// Calls fn(i) for i in [0, n) on worker_count(n) threads. The first
// exception in index order is rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

struct CheckRow {
  int trial = 0;
  std::string quantity;
  double bound = 0.0;
  double observed = 0.0;
  bool holds = false;
};
void write_check_csv(std::ostream& out, const std::vector<CheckRow>& rows);

// FTRL regret-bound audits for both regularizers on random loss sequences.
std::vector<CheckRow> validate_ftrl(int trials, std::uint64_t seed);
// MGR bias, magnitude-reduced lower bound and bonus magnitude on the config's
// environment under the uniform policy.
std::vector<CheckRow> check_estimators(const ExperimentConfig& config);
// Empirical covariance sandwich on the config's environment.
std::vector<CheckRow> check_covariance(const ExperimentConfig& config);

}  // namespace advlin

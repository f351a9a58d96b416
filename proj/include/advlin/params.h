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

#include "json.hpp"

namespace advlin {

enum class Algo { kLogBarrier, kMagReduced, kLinMdp, kBaseline };

std::string to_string(Algo algo);
Algo parse_algo(const std::string& name);

/// User-supplied parameter values; anything absent is derived.
struct ParamOverrides {
  std::optional<double> eta, beta, gamma, epsilon;
  std::optional<long long> mgr_M, mgr_N;
  std::optional<long long> M;  // extra simulated episodes (magnitude-reduced)
  std::optional<long long> W;
  std::optional<double> delta_e, alpha, delta;
  std::optional<long long> M0, N0;
  std::optional<bool> strict;
  // Desk-scale caps used in lenient mode when a count is derived.
  std::optional<long long> mgr_M_cap, mgr_N_cap, M_cap, W_cap, M0_cap, N0_cap;
  std::optional<std::uint64_t> simulator_budget;
};

// Parses the "params" object of a config. Unknown keys and wrong types raise
// ConfigError with a "params.<key>" path.
ParamOverrides parse_param_overrides(const nlohmann::json& doc);

struct ConditionViolation {
  std::string name;  // e.g. "12*eta*beta*H^2 <= gamma"
  double lhs = 0.0;
  double rhs = 0.0;
};

/// A count that was capped below its theoretical value.
struct CountDeficit {
  std::string name;
  long long theoretical = 0;  // saturates at LLONG_MAX
  long long used = 0;
};

struct ResolvedParams {
  Algo algo = Algo::kLogBarrier;
  int K = 1, H = 1, d = 1, A = 1;
  bool strict = false;
  double eta = 0.0, beta = 0.0, gamma = 0.0, epsilon = 0.0;
  long long mgr_M = 1, mgr_N = 0;
  long long M = 1;
  // Simulator-free learner.
  long long W = 0;
  long long K0 = 0;
  double delta_e = 0.0, alpha = 0.0, delta = 0.0;
  long long M0 = 1, N0 = 1;
  std::uint64_t simulator_budget = 0;  // 0 means unlimited
  std::vector<ConditionViolation> violations;
  std::vector<CountDeficit> deficits;

  nlohmann::json to_json() const;
};

// Relative slack used when comparing both sides of a parameter condition,
// so that default tunings that meet a condition with equality pass.
inline constexpr double kConditionSlack = 1e-12;

// Fills every parameter for (algo, K, H, d, A), checks the algorithm's
// conditions and the requested counts. In strict mode any violated condition
// or capped count raises ConfigError; in lenient mode they are recorded.
ResolvedParams resolve_params(Algo algo, const ParamOverrides& o, int K, int H,
                              int d, int A);

// Condition checks, exposed for tests.
std::vector<ConditionViolation> check_conditions(const ResolvedParams& p);

}  // namespace advlin

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

#include <vector>

#include <Eigen/Core>

// FTRL over the probability simplex with the log-barrier and the negative
// entropy regularizers, plus the tools used to audit their regret bounds.
namespace advlin::ftrl {

inline constexpr double kDefaultTol = 1e-10;
inline constexpr int kMaxSolverIterations = 200;

struct SolverInfo {
  double lambda = 0.0;            // multiplier in x_i = 1 / (eta C_i + lambda)
  int iterations = 0;
  double sum_residual = 0.0;      // |sum_i x_i - 1| after normalization
  double stationarity_residual = 0.0;  // max_i |x_i (eta C_i + lambda) - 1|
};

// argmin_x eta <x, cum> + sum_i ln(1 / x_i) over the simplex.
// Throws InputError on non-finite input or eta <= 0, NumericalError if the
// multiplier search does not converge.
Eigen::VectorXd logbarrier_step(const Eigen::VectorXd& cum, double eta,
                                double tol = kDefaultTol,
                                SolverInfo* info = nullptr);

// x_i proportional to exp(-eta cum_i).
Eigen::VectorXd hedge_step(const Eigen::VectorXd& cum, double eta);

// Psi(x) = sum_i ln(1 / x_i). DomainError on a zero coordinate.
double logbarrier_psi(const Eigen::VectorXd& x);
// Psi(x) = sum_i x_i ln x_i, with 0 ln 0 = 0.
double negentropy_psi(const Eigen::VectorXd& x);

// Bregman divergence of the log-barrier between interior points.
double bregman_logbarrier(const Eigen::VectorXd& y, const Eigen::VectorXd& x);
// sum_i (y_i - x_i)^2 / (2 x_i); lower bound on the divergence above.
double bregman_lower_bound(const Eigen::VectorXd& y, const Eigen::VectorXd& x);

enum class Regularizer { kLogBarrier, kNegEntropy };

struct AuditRecord {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
  // Always true for the log-barrier. For Hedge: min_t,i eta c_ti >= -1.
  bool precondition_ok = true;
};

inline constexpr double kAuditTol = 1e-9;

// Replays FTRL from the uniform point on c_1..c_T and compares the regret
// against y with (Psi(y) - Psi(x_1)) / eta + eta sum_t sum_i x_ti c_ti^2.
AuditRecord regret_audit(Regularizer reg,
                         const std::vector<Eigen::VectorXd>& losses,
                         double eta, const Eigen::VectorXd& y);

// (1 - A/K) target + 1/K; every coordinate is at least 1/K. Requires K > A.
Eigen::VectorXd smooth_comparator(const Eigen::VectorXd& target, long long K);

}  // namespace advlin::ftrl

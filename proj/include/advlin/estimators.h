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
#include <vector>

#include <Eigen/Core>

#include "advlin/mdp.h"
#include "advlin/rng.h"

namespace advlin {

/// Estimate of (gamma I + Sigma_h)^{-1} for one layer.
struct CovInverseEstimate {
  enum class Method { kMgr, kEmpirical };

  Eigen::MatrixXd matrix;
  Method method = Method::kEmpirical;
  double gamma = 0.0;
  // MGR only: the raw average was indefinite and got projected onto the PSD
  // cone; `clipped` is the most negative eigenvalue removed.
  bool psd_projected = false;
  double clipped = 0.0;
};

/// Matrix geometric resampling configuration.
struct MgrParams {
  double gamma = 0.1;
  double epsilon = 0.1;
  long long M = 1;
  long long N = 1;
  double c = 0.5;
};

// Smallest M and N meeting M >= 24 ln(dHT) / (eps^2 gamma^2) and
// N >= (2 / gamma) ln(1 / (eps gamma)).
long long mgr_strict_M(int d, int H, long long T, double epsilon, double gamma);
long long mgr_strict_N(double epsilon, double gamma);

struct MgrResult {
  std::vector<CovInverseEstimate> layers;  // layers[h-1]
  std::uint64_t simulator_calls = 0;
  bool any_projected = false;
};

// Runs M*N simulated trajectories of `policy` and returns one estimate per
// layer. The budget for M*N*(H-1) calls is checked before any sampling.
MgrResult mgr_estimate(Simulator& sim, const Policy& policy,
                       const MgrParams& params, RandomStream& rng);

// Mean of phi phi^T over the columns of `samples` (d x n).
Eigen::MatrixXd empirical_covariance(const Eigen::MatrixXd& samples);
// (gamma I + mean phi phi^T)^{-1} by Cholesky.
CovInverseEstimate empirical_cov_inverse(const Eigen::MatrixXd& samples,
                                         double gamma);
CovInverseEstimate empirical_cov_inverse(
    const std::vector<Eigen::VectorXd>& samples, double gamma);

struct SandwichResult {
  bool precondition_ok = true;
  bool holds = false;
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
  // Distance by which the eigenvalues leave the target interval (0 if inside).
  double max_violation = 0.0;
};

// Eigenvalues of S^{1/2} (gamma I + sigma_true) S^{1/2} against
// [1 - 2 sqrt(gamma), 1 + 2 sqrt(gamma)]. Precondition: gamma <= 1/4.
SandwichResult sandwich_check(const CovInverseEstimate& est,
                              const Eigen::MatrixXd& sigma_true, double gamma);

// Two-sided multiplicative bound between (gamma I + sigma_emp) and
// (gamma I + sigma_true) with factors 1 -/+ sqrt(gamma), checked through the
// eigenvalues of the whitened ratio.
SandwichResult multiplicative_check(const Eigen::MatrixXd& sigma_emp,
                                    const Eigen::MatrixXd& sigma_true,
                                    double gamma);

// phi_sa^T S phi_traj * L.
double q_hat_standard(const Eigen::VectorXd& phi_sa,
                      const Eigen::MatrixXd& cov_inv,
                      const Eigen::VectorXd& phi_traj, double L);

struct QEstimate {
  double value = 0.0;
  double main = 0.0;            // z * L
  double negative_part = 0.0;   // -H * min(z, 0)
  double mean_term = 0.0;       // H * m_k
};

inline double negative_part(double z) { return z < 0.0 ? z : 0.0; }

// m_k = mean over samples of min(phi_sa^T S phi_m, 0). `samples` is d x M.
double negative_part_mean(const Eigen::VectorXd& phi_sa,
                          const Eigen::MatrixXd& cov_inv,
                          const Eigen::MatrixXd& samples);

// z L - H min(z, 0) + H m_k with z = phi_sa^T S phi_traj.
QEstimate magnitude_reduced_from_parts(double z, double L, int H, double m_k);
QEstimate magnitude_reduced_estimate(const Eigen::VectorXd& phi_sa,
                                     const Eigen::MatrixXd& cov_inv,
                                     const Eigen::VectorXd& phi_traj, double L,
                                     int H, const Eigen::MatrixXd& samples);

// || S^{1/2} sigma_emp S^{1/2} ||_2, computed as
// || sigma_emp^{1/2} S sigma_emp^{1/2} ||_2 (same spectrum).
double resampling_norm(const Eigen::MatrixXd& cov_inv,
                       const Eigen::MatrixXd& sigma_emp);
inline constexpr double kResamplingThreshold = 3.0;
bool resampling_check(const Eigen::MatrixXd& cov_inv,
                      const Eigen::MatrixXd& sigma_emp);

struct ConcentrationResult {
  bool precondition_ok = true;
  bool holds = false;
  // Largest |eigenvalue| of H^{-1/4} (mean - H) H^{-1/4} over the radius.
  double ratio = 0.0;
};

// Draws n i.i.d. matrices from a finite-support distribution and checks
// -r H^{1/2} <= mean - H <= r H^{1/2} with r = sqrt((d/n) ln(d/delta)).
// Requires every support matrix to be PSD with norm <= 1.
ConcentrationResult concentration_probe(
    const std::vector<Eigen::MatrixXd>& support, const Eigen::VectorXd& probs,
    long long n, double delta, RandomStream& rng);

}  // namespace advlin

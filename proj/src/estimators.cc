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

#include "advlin/estimators.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

#include "advlin/errors.h"
#include "advlin/linalg.h"

namespace advlin {

namespace {

// Relative slack on the 1/gamma norm bound of MGR output.
constexpr double kNormSlack = 1e-9;

long long saturating_ceil(double v) {
  if (!(v < 9.0e18)) return std::numeric_limits<long long>::max();
  return static_cast<long long>(std::ceil(v));
}

}  // namespace

long long mgr_strict_M(int d, int H, long long T, double epsilon,
                       double gamma) {
  if (!(epsilon > 0.0) || !(gamma > 0.0)) {
    throw InputError("epsilon and gamma must be positive");
  }
  const double v = 24.0 * std::log(static_cast<double>(d) * H * T) /
                   (epsilon * epsilon * gamma * gamma);
  return std::max(1LL, saturating_ceil(v));
}

long long mgr_strict_N(double epsilon, double gamma) {
  if (!(epsilon > 0.0) || !(gamma > 0.0)) {
    throw InputError("epsilon and gamma must be positive");
  }
  const double v = 2.0 / gamma * std::log(1.0 / (epsilon * gamma));
  return std::max(0LL, saturating_ceil(v));
}

MgrResult mgr_estimate(Simulator& sim, const Policy& policy,
                       const MgrParams& params, RandomStream& rng) {
  const LayeredMdp& mdp = sim.mdp();
  if (params.M < 1 || params.N < 0) throw InputError("MGR needs M >= 1, N >= 0");
  if (!(params.gamma > 0.0) || params.gamma > 1.0) {
    throw InputError("MGR needs gamma in (0, 1]");
  }
  if (policy.num_states() != mdp.num_states()) {
    throw InputError("policy shape does not match the MDP");
  }
  const int H = mdp.horizon();
  const int d = mdp.feature_dim();
  const double c = params.c;
  const double shrink = 1.0 - c * params.gamma;
  sim.require(static_cast<std::uint64_t>(params.M) *
              static_cast<std::uint64_t>(params.N) *
              static_cast<std::uint64_t>(H - 1));
  const std::uint64_t calls_before = sim.calls();

  // Columns of the transposed policy are contiguous action distributions.
  const Eigen::MatrixXd pt = policy.matrix().transpose();
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(d, d);
  std::vector<Eigen::MatrixXd> total(H, Eigen::MatrixXd::Zero(d, d));
  std::vector<Eigen::MatrixXd> z(H), acc(H);
  Eigen::VectorXd zphi(d);
  for (long long m = 0; m < params.M; ++m) {
    for (int h = 0; h < H; ++h) {
      z[h] = eye;
      acc[h].setZero(d, d);
    }
    for (long long n = 0; n < params.N; ++n) {
      std::size_t s = mdp.initial_state();
      for (int h = 0; h < H; ++h) {
        const int a = static_cast<int>(rng.categorical(pt.col(s)));
        const Eigen::VectorXd& phi = mdp.feature(s, a);
        // Z (I - c(gamma I + phi phi^T)) = (1 - c gamma) Z - c (Z phi) phi^T.
        zphi.noalias() = z[h] * phi;
        z[h] *= shrink;
        z[h].noalias() -= (c * zphi) * phi.transpose();
        acc[h] += z[h];
        if (h + 1 < H) s = sim.step(s, a, rng);
      }
    }
    for (int h = 0; h < H; ++h) total[h] += c * eye + c * acc[h];
  }

  MgrResult out;
  out.simulator_calls = sim.calls() - calls_before;
  for (int h = 0; h < H; ++h) {
    CovInverseEstimate est;
    est.method = CovInverseEstimate::Method::kMgr;
    est.gamma = params.gamma;
    Eigen::MatrixXd mean = linalg::symmetrize(total[h] / params.M);
    double clipped = 0.0;
    est.matrix = linalg::project_psd(mean, &clipped);
    est.clipped = clipped;
    est.psd_projected = clipped < 0.0;
    out.any_projected = out.any_projected || est.psd_projected;
    if (linalg::sym_norm(est.matrix) > (1.0 + kNormSlack) / params.gamma) {
      throw InvariantError("MGR estimate exceeds the 1/gamma norm bound");
    }
    out.layers.push_back(std::move(est));
  }
  return out;
}

Eigen::MatrixXd empirical_covariance(const Eigen::MatrixXd& samples) {
  if (samples.cols() == 0) throw InputError("need at least one sample");
  Eigen::MatrixXd sigma = samples * samples.transpose();
  sigma /= static_cast<double>(samples.cols());
  return linalg::symmetrize(sigma);
}

CovInverseEstimate empirical_cov_inverse(const Eigen::MatrixXd& samples,
                                         double gamma) {
  if (!(gamma > 0.0)) throw InputError("gamma must be positive");
  const Eigen::Index d = samples.rows();
  CovInverseEstimate est;
  est.method = CovInverseEstimate::Method::kEmpirical;
  est.gamma = gamma;
  est.matrix = linalg::spd_inverse(gamma * Eigen::MatrixXd::Identity(d, d) +
                                   empirical_covariance(samples));
  return est;
}

CovInverseEstimate empirical_cov_inverse(
    const std::vector<Eigen::VectorXd>& samples, double gamma) {
  if (samples.empty()) throw InputError("need at least one sample");
  Eigen::MatrixXd m(samples.front().size(),
                    static_cast<Eigen::Index>(samples.size()));
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].size() != m.rows()) {
      throw InputError("samples have inconsistent dimension");
    }
    m.col(static_cast<Eigen::Index>(i)) = samples[i];
  }
  return empirical_cov_inverse(m, gamma);
}

namespace {

SandwichResult interval_check(const Eigen::MatrixXd& middle, double lo,
                              double hi) {
  const Eigen::VectorXd ev = linalg::eigenvalues(middle);
  SandwichResult r;
  r.min_eigenvalue = ev.minCoeff();
  r.max_eigenvalue = ev.maxCoeff();
  r.max_violation =
      std::max({0.0, lo - r.min_eigenvalue, r.max_eigenvalue - hi});
  r.holds = r.max_violation == 0.0;
  return r;
}

}  // namespace

SandwichResult sandwich_check(const CovInverseEstimate& est,
                              const Eigen::MatrixXd& sigma_true, double gamma) {
  if (est.method != CovInverseEstimate::Method::kEmpirical) {
    throw InputError("sandwich check applies to empirical estimates");
  }
  if (est.matrix.rows() != sigma_true.rows()) {
    throw InputError("dimension mismatch");
  }
  const Eigen::Index d = sigma_true.rows();
  const Eigen::MatrixXd root = linalg::psd_sqrt(est.matrix);
  const Eigen::MatrixXd middle =
      root * (gamma * Eigen::MatrixXd::Identity(d, d) + sigma_true) * root;
  const double r = 2.0 * std::sqrt(gamma);
  SandwichResult out = interval_check(middle, 1.0 - r, 1.0 + r);
  out.precondition_ok = gamma <= 0.25;
  return out;
}

SandwichResult multiplicative_check(const Eigen::MatrixXd& sigma_emp,
                                    const Eigen::MatrixXd& sigma_true,
                                    double gamma) {
  if (sigma_emp.rows() != sigma_true.rows()) {
    throw InputError("dimension mismatch");
  }
  const Eigen::MatrixXd eye =
      Eigen::MatrixXd::Identity(sigma_true.rows(), sigma_true.cols());
  const Eigen::MatrixXd w = linalg::pd_inv_sqrt(gamma * eye + sigma_true);
  const double r = std::sqrt(gamma);
  return interval_check(w * (gamma * eye + sigma_emp) * w, 1.0 - r, 1.0 + r);
}

double q_hat_standard(const Eigen::VectorXd& phi_sa,
                      const Eigen::MatrixXd& cov_inv,
                      const Eigen::VectorXd& phi_traj, double L) {
  return linalg::quad(phi_sa, cov_inv, phi_traj) * L;
}

double negative_part_mean(const Eigen::VectorXd& phi_sa,
                          const Eigen::MatrixXd& cov_inv,
                          const Eigen::MatrixXd& samples) {
  if (samples.cols() == 0) throw InputError("need at least one sample");
  const Eigen::RowVectorXd w = phi_sa.transpose() * cov_inv;
  const Eigen::RowVectorXd z = w * samples;
  return z.array().min(0.0).sum() / static_cast<double>(samples.cols());
}

QEstimate magnitude_reduced_from_parts(double z, double L, int H, double m_k) {
  QEstimate q;
  q.main = z * L;
  q.negative_part = -H * negative_part(z);
  q.mean_term = H * m_k;
  q.value = q.main + q.negative_part + q.mean_term;
  return q;
}

QEstimate magnitude_reduced_estimate(const Eigen::VectorXd& phi_sa,
                                     const Eigen::MatrixXd& cov_inv,
                                     const Eigen::VectorXd& phi_traj, double L,
                                     int H, const Eigen::MatrixXd& samples) {
  const double m_k = negative_part_mean(phi_sa, cov_inv, samples);
  return magnitude_reduced_from_parts(linalg::quad(phi_sa, cov_inv, phi_traj),
                                      L, H, m_k);
}

double resampling_norm(const Eigen::MatrixXd& cov_inv,
                       const Eigen::MatrixXd& sigma_emp) {
  if (cov_inv.rows() != sigma_emp.rows()) {
    throw InputError("dimension mismatch");
  }
  const Eigen::MatrixXd root = linalg::psd_sqrt(sigma_emp);
  return linalg::sym_norm(root * cov_inv * root);
}

bool resampling_check(const Eigen::MatrixXd& cov_inv,
                      const Eigen::MatrixXd& sigma_emp) {
  return resampling_norm(cov_inv, sigma_emp) < kResamplingThreshold;
}

ConcentrationResult concentration_probe(
    const std::vector<Eigen::MatrixXd>& support, const Eigen::VectorXd& probs,
    long long n, double delta, RandomStream& rng) {
  if (support.empty() ||
      static_cast<Eigen::Index>(support.size()) != probs.size()) {
    throw InputError("support and probabilities must match");
  }
  if (n < 1 || !(delta > 0.0 && delta < 1.0)) {
    throw InputError("need n >= 1 and delta in (0, 1)");
  }
  const Eigen::Index d = support.front().rows();
  Eigen::MatrixXd mean_true = Eigen::MatrixXd::Zero(d, d);
  const double total = probs.sum();
  for (std::size_t j = 0; j < support.size(); ++j) {
    mean_true += probs[static_cast<Eigen::Index>(j)] / total * support[j];
  }
  mean_true = linalg::symmetrize(mean_true);

  std::vector<long long> counts(support.size(), 0);
  for (long long i = 0; i < n; ++i) ++counts[rng.categorical(probs)];
  Eigen::MatrixXd mean_emp = Eigen::MatrixXd::Zero(d, d);
  for (std::size_t j = 0; j < support.size(); ++j) {
    mean_emp += static_cast<double>(counts[j]) / n * support[j];
  }

  const double log_term = std::log(d / delta);
  const double radius = std::sqrt(d * log_term / n);
  ConcentrationResult out;
  out.precondition_ok =
      linalg::min_eigenvalue(mean_true) >= log_term / (d * n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(mean_true);
  const Eigen::VectorXd ev = es.eigenvalues();
  if (!(ev.minCoeff() > 0.0)) {
    out.holds = false;
    out.ratio = std::numeric_limits<double>::infinity();
    return out;
  }
  // X <= r H^{1/2}  iff  H^{-1/4} X H^{-1/4} <= r I.
  const Eigen::MatrixXd w = es.eigenvectors() *
                            ev.array().pow(-0.25).matrix().asDiagonal() *
                            es.eigenvectors().transpose();
  out.ratio = linalg::sym_norm(w * (mean_emp - mean_true) * w) / radius;
  out.holds = out.ratio <= 1.0;
  return out;
}

}  // namespace advlin

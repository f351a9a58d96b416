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

#include "advlin/ftrl.h"

#include <cmath>
#include <limits>
#include <string>

#include "advlin/errors.h"

namespace advlin::ftrl {

namespace {

void check_finite(const Eigen::VectorXd& v, const char* what) {
  if (v.size() == 0) throw InputError(std::string(what) + " is empty");
  if (!v.allFinite()) throw InputError(std::string(what) + " is not finite");
}

void check_eta(double eta) {
  if (!(eta > 0.0) || !std::isfinite(eta)) {
    throw InputError("eta must be positive and finite");
  }
}

}  // namespace

Eigen::VectorXd logbarrier_step(const Eigen::VectorXd& cum, double eta,
                                double tol, SolverInfo* info) {
  check_finite(cum, "cumulative loss");
  check_eta(eta);
  if (!(tol > 0.0)) throw InputError("tol must be positive");
  const Eigen::Index A = cum.size();
  const double cmin = cum.minCoeff();
  // Shifted linear terms z_i >= 0 with min z = 0. With u = lambda + eta*min C
  // the constraint reads f(u) = sum 1 / (z_i + u) - 1 = 0, and f(1) >= 0 >=
  // f(A), so the root is bracketed in [1, A].
  const Eigen::VectorXd z = eta * (cum.array() - cmin).matrix();
  auto f = [&](double u) { return (z.array() + u).inverse().sum() - 1.0; };
  auto df = [&](double u) { return -(z.array() + u).square().inverse().sum(); };

  double lo = 1.0;
  double hi = static_cast<double>(A);
  double flo = f(lo);
  double fhi = f(hi);
  if (flo < 0.0 || fhi > 0.0) {
    throw NumericalError("log-barrier multiplier is not bracketed");
  }
  int iterations = 0;
  double u = 0.5 * (lo + hi);
  bool converged = false;
  // Bisection until the bracket is narrow, then guarded Newton; if Newton
  // stalls or leaves the bracket, fall back to bisection.
  int newton_left = 5;
  while (iterations < kMaxSolverIterations) {
    ++iterations;
    const double fu = f(u);
    if (fu == 0.0 || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) {
      converged = true;
      break;
    }
    if (fu > 0.0) {
      lo = u;
      flo = fu;
    } else {
      hi = u;
      fhi = fu;
    }
    if (flo < fhi) throw NumericalError("constraint map is not monotone");
    double next = 0.5 * (lo + hi);
    if (hi - lo <= 1e-3 * lo && newton_left > 0) {
      --newton_left;
      const double step = u - fu / df(u);
      if (step > lo && step < hi) {
        next = step;
        if (std::abs(step - u) <= 1e-15 * u) {
          u = step;
          converged = true;
          break;
        }
      }
    }
    u = next;
  }
  if (!converged) {
    throw NumericalError("log-barrier solver did not converge in " +
                         std::to_string(kMaxSolverIterations) + " iterations");
  }
  Eigen::VectorXd x = (z.array() + u).inverse().matrix();
  const double sum = x.sum();
  x /= sum;
  const double lambda = u - eta * cmin;
  const double stat =
      (x.array() * (z.array() + u) - 1.0).abs().maxCoeff();
  const double sum_res = std::abs(x.sum() - 1.0);
  if (stat > tol || sum_res > tol) {
    throw NumericalError("log-barrier residual " + std::to_string(stat) +
                         " exceeds tolerance");
  }
  if (info != nullptr) {
    info->lambda = lambda;
    info->iterations = iterations;
    info->sum_residual = sum_res;
    info->stationarity_residual = stat;
  }
  return x;
}

Eigen::VectorXd hedge_step(const Eigen::VectorXd& cum, double eta) {
  check_finite(cum, "cumulative loss");
  check_eta(eta);
  const double cmin = cum.minCoeff();
  Eigen::VectorXd w = (-eta * (cum.array() - cmin)).exp().matrix();
  return w / w.sum();
}

double logbarrier_psi(const Eigen::VectorXd& x) {
  if (!(x.minCoeff() > 0.0)) {
    throw DomainError("log-barrier is infinite on the simplex boundary");
  }
  return -x.array().log().sum();
}

double negentropy_psi(const Eigen::VectorXd& x) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x[i] > 0.0) s += x[i] * std::log(x[i]);
  }
  return s;
}

double bregman_logbarrier(const Eigen::VectorXd& y, const Eigen::VectorXd& x) {
  if (y.size() != x.size()) throw InputError("dimension mismatch");
  if (!(y.minCoeff() > 0.0) || !(x.minCoeff() > 0.0)) {
    throw DomainError("log-barrier divergence needs interior points");
  }
  return ((x.array() / y.array()).log() + (y.array() - x.array()) / x.array())
      .sum();
}

double bregman_lower_bound(const Eigen::VectorXd& y, const Eigen::VectorXd& x) {
  if (y.size() != x.size()) throw InputError("dimension mismatch");
  if (!(x.minCoeff() > 0.0)) throw DomainError("x must be interior");
  return ((y - x).array().square() / (2.0 * x.array())).sum();
}

AuditRecord regret_audit(Regularizer reg,
                         const std::vector<Eigen::VectorXd>& losses,
                         double eta, const Eigen::VectorXd& y) {
  if (losses.empty()) throw InputError("audit needs at least one round");
  check_eta(eta);
  const Eigen::Index A = y.size();
  const bool lb = reg == Regularizer::kLogBarrier;
  if (lb && !(y.minCoeff() > 0.0)) {
    throw DomainError("log-barrier audit needs an interior comparator");
  }
  const Eigen::VectorXd x1 = Eigen::VectorXd::Constant(A, 1.0 / A);
  AuditRecord rec;
  Eigen::VectorXd cum = Eigen::VectorXd::Zero(A);
  double lhs = 0.0;
  double stability = 0.0;
  for (const auto& c : losses) {
    if (c.size() != A) throw InputError("loss vector has wrong dimension");
    check_finite(c, "loss vector");
    if (!lb && (eta * c).minCoeff() < -1.0) rec.precondition_ok = false;
    const Eigen::VectorXd x = lb ? logbarrier_step(cum, eta)
                                 : hedge_step(cum, eta);
    lhs += (x - y).dot(c);
    stability += (x.array() * c.array().square()).sum();
    cum += c;
  }
  const double psi_gap =
      lb ? logbarrier_psi(y) - logbarrier_psi(x1)
         : negentropy_psi(y) - negentropy_psi(x1);
  rec.lhs = lhs;
  rec.rhs = psi_gap / eta + eta * stability;
  rec.holds = rec.lhs <= rec.rhs + kAuditTol;
  return rec;
}

Eigen::VectorXd smooth_comparator(const Eigen::VectorXd& target, long long K) {
  const Eigen::Index A = target.size();
  if (K <= A) throw InputError("smoothing needs K > A");
  check_finite(target, "target");
  const double kk = static_cast<double>(K);
  return ((1.0 - A / kk) * target.array() + 1.0 / kk).matrix();
}

}  // namespace advlin::ftrl

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

#include "advlin/linalg.h"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "advlin/errors.h"

namespace advlin::linalg {

namespace {

Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> decompose(
    const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw InputError("expected a square matrix");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrize(a));
  if (es.info() != Eigen::Success) {
    throw NumericalError("symmetric eigendecomposition failed");
  }
  return es;
}

// Eigenvalues with noise-level negatives clamped to zero.
Eigen::VectorXd clamped(const Eigen::VectorXd& ev) {
  const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  Eigen::VectorXd out = ev;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev[i] < 0.0) {
      if (ev[i] < -kPsdFloor * scale) {
        throw NumericalError("matrix is not PSD: eigenvalue " +
                             std::to_string(ev[i]));
      }
      out[i] = 0.0;
    }
  }
  return out;
}

}  // namespace

Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& a) {
  return 0.5 * (a + a.transpose());
}

Eigen::VectorXd eigenvalues(const Eigen::MatrixXd& a) {
  if (a.size() == 0) return Eigen::VectorXd();
  return decompose(a).eigenvalues();
}

double min_eigenvalue(const Eigen::MatrixXd& a) {
  return eigenvalues(a).minCoeff();
}

double max_eigenvalue(const Eigen::MatrixXd& a) {
  return eigenvalues(a).maxCoeff();
}

double sym_norm(const Eigen::MatrixXd& a) {
  return eigenvalues(a).cwiseAbs().maxCoeff();
}

double operator_norm(const Eigen::MatrixXd& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  return svd.singularValues()[0];
}

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& a) {
  auto es = decompose(a);
  const Eigen::VectorXd ev = clamped(es.eigenvalues()).cwiseSqrt();
  const Eigen::MatrixXd& v = es.eigenvectors();
  return symmetrize(v * ev.asDiagonal() * v.transpose());
}

Eigen::MatrixXd pd_inv_sqrt(const Eigen::MatrixXd& a) {
  auto es = decompose(a);
  const Eigen::VectorXd& ev = es.eigenvalues();
  if (!(ev.minCoeff() > 0.0)) {
    throw NumericalError("pd_inv_sqrt: matrix is not positive definite");
  }
  const Eigen::MatrixXd& v = es.eigenvectors();
  return symmetrize(v * ev.cwiseSqrt().cwiseInverse().asDiagonal() *
                    v.transpose());
}

Eigen::MatrixXd spd_inverse(const Eigen::MatrixXd& a) {
  Eigen::LLT<Eigen::MatrixXd> llt(symmetrize(a));
  if (llt.info() != Eigen::Success) {
    throw NumericalError("spd_inverse: Cholesky factorization failed");
  }
  const Eigen::MatrixXd inv =
      llt.solve(Eigen::MatrixXd::Identity(a.rows(), a.cols()));
  return symmetrize(inv);
}

Eigen::MatrixXd project_psd(const Eigen::MatrixXd& a, double* clipped) {
  auto es = decompose(a);
  Eigen::VectorXd ev = es.eigenvalues();
  const double most_negative = std::min(0.0, ev.minCoeff());
  if (clipped != nullptr) *clipped = most_negative;
  if (most_negative == 0.0) return symmetrize(a);
  ev = ev.cwiseMax(0.0);
  const Eigen::MatrixXd& v = es.eigenvectors();
  return symmetrize(v * ev.asDiagonal() * v.transpose());
}

}  // namespace advlin::linalg

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

#include <Eigen/Core>

// Small dense helpers for symmetric (mostly PSD) matrices. Everything goes
// through a symmetric eigendecomposition; inputs are symmetrized first.
namespace advlin::linalg {

// Eigenvalues at or above -kPsdFloor * max(1, |A|) are treated as float
// noise and clamped to zero; anything more negative is an error.
inline constexpr double kPsdFloor = 1e-12;

Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& a);

// Ascending eigenvalues of the symmetric part of `a`.
Eigen::VectorXd eigenvalues(const Eigen::MatrixXd& a);
double min_eigenvalue(const Eigen::MatrixXd& a);
double max_eigenvalue(const Eigen::MatrixXd& a);
// Spectral norm of a symmetric matrix (max |eigenvalue|).
double sym_norm(const Eigen::MatrixXd& a);
// Spectral norm of an arbitrary matrix (largest singular value).
double operator_norm(const Eigen::MatrixXd& a);

// Square root of a PSD matrix. Throws NumericalError if an eigenvalue is
// below the noise floor.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& a);
// Inverse square root of a positive-definite matrix.
Eigen::MatrixXd pd_inv_sqrt(const Eigen::MatrixXd& a);
// Inverse of a symmetric positive-definite matrix via Cholesky. The result
// is symmetrized.
Eigen::MatrixXd spd_inverse(const Eigen::MatrixXd& a);

// Nearest PSD matrix in Frobenius norm (negative eigenvalues set to zero).
// `clipped` receives the most negative eigenvalue removed (0 if none).
Eigen::MatrixXd project_psd(const Eigen::MatrixXd& a, double* clipped);

// y' A x with A symmetric.
inline double quad(const Eigen::VectorXd& y, const Eigen::MatrixXd& a,
                   const Eigen::VectorXd& x) {
  return y.dot(a * x);
}

}  // namespace advlin::linalg

// Copyright 2026 The mimoscope Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstddef>

namespace mimoscope {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

/// Square complex matrix that is Hermitian within 1e-10 (absolute) with
/// diagonal imaginary parts below 1e-12. Stored exactly Hermitian: the
/// constructor mirrors the upper triangle and zeroes diagonal imaginary parts.
class HermitianMatrix {
 public:
  static constexpr double kSymmetryTolerance = 1e-10;
  static constexpr double kDiagonalImagTolerance = 1e-12;

  explicit HermitianMatrix(const CMatrix& entries);

  Eigen::Index dim() const noexcept { return entries_.rows(); }
  const CMatrix& matrix() const noexcept { return entries_; }
  std::complex<double> operator()(Eigen::Index i, Eigen::Index j) const { return entries_(i, j); }

 private:
  CMatrix entries_;
};

/// Eigenvalues sorted non-increasing; column j of basis pairs with values[j].
/// Each basis column is phase-normalized so its largest-magnitude component
/// is real and nonnegative.
struct EigenSpectrum {
  RVector values;
  CMatrix basis;

  Eigen::Index dim() const noexcept { return values.size(); }
};

struct JacobiOptions {
  int max_sweeps = 100;
  double relative_tolerance = 1e-12;
};

/// H^H H for an M x K matrix. Throws kInvalidInput on empty or non-finite input.
HermitianMatrix gram(const CMatrix& matrix);

/// Cyclic Jacobi eigendecomposition. Sweeps visit (p, q) in row order, so the
/// result is deterministic for a fixed input. Iterates until the
/// off-diagonal Frobenius norm drops below relative_tolerance times its
/// initial value (or below n * eps * ||A||_F, whichever is larger); throws
/// kConvergence (with the residual) otherwise.
/// Negative eigenvalues within 1e-12 * max|lambda| of zero are set to 0.
EigenSpectrum eigh(const HermitianMatrix& matrix, const JacobiOptions& options = {});

double frobenius_norm_sq(const CMatrix& matrix);

/// Eigenvalues below 1e-12 * lambda_max replaced by exactly 0. Apply before
/// forming any eigenvalue ratio or rank decision.
RVector clamped_values(const EigenSpectrum& spectrum);

inline constexpr double kEigenClampRatio = 1e-12;

/// Number of eigenvalues that survive clamping.
Eigen::Index numerical_rank(const EigenSpectrum& spectrum);

/// Principal square root of a positive semidefinite Hermitian matrix.
CMatrix psd_sqrt(const HermitianMatrix& matrix);

}  // namespace mimoscope

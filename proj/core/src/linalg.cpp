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

#include "mimoscope/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "mimoscope/error.hpp"

namespace mimoscope {

namespace {

bool all_finite(const CMatrix& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) return false;
  return true;
}

double off_diagonal_norm(const CMatrix& a) {
  double sum = 0.0;
  const Eigen::Index n = a.rows();
  for (Eigen::Index p = 0; p < n; ++p)
    for (Eigen::Index q = p + 1; q < n; ++q) sum += std::norm(a(p, q));
  return std::sqrt(2.0 * sum);
}

void normalize_phase(CMatrix& basis) {
  for (Eigen::Index j = 0; j < basis.cols(); ++j) {
    Eigen::Index best = 0;
    double best_mag = -1.0;
    for (Eigen::Index i = 0; i < basis.rows(); ++i) {
      const double mag = std::abs(basis(i, j));
      if (mag > best_mag) {
        best_mag = mag;
        best = i;
      }
    }
    if (best_mag <= 0.0) continue;
    const std::complex<double> phase = basis(best, j) / best_mag;
    basis.col(j) *= std::conj(phase);
    basis(best, j) = best_mag;
  }
}

}  // namespace

HermitianMatrix::HermitianMatrix(const CMatrix& entries) : entries_(entries) {
  if (entries_.rows() == 0 || entries_.rows() != entries_.cols()) {
    throw Error(ErrorKind::kInvalidInput, "Hermitian matrix must be square and non-empty");
  }
  if (!all_finite(entries_)) throw Error(ErrorKind::kInvalidInput, "matrix has non-finite entries");
  const Eigen::Index n = entries_.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(entries_(i, i).imag()) > kDiagonalImagTolerance) {
      throw Error(ErrorKind::kInvalidInput, "diagonal entry " + std::to_string(i) + " is not real");
    }
    entries_(i, i) = entries_(i, i).real();
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (std::abs(entries_(i, j) - std::conj(entries_(j, i))) > kSymmetryTolerance) {
        throw Error(ErrorKind::kInvalidInput, "matrix is not Hermitian");
      }
      entries_(j, i) = std::conj(entries_(i, j));
    }
  }
}

HermitianMatrix gram(const CMatrix& matrix) {
  if (matrix.rows() == 0 || matrix.cols() == 0) throw Error(ErrorKind::kInvalidInput, "empty matrix");
  if (!all_finite(matrix)) throw Error(ErrorKind::kInvalidInput, "matrix has non-finite entries");
  CMatrix g = matrix.adjoint() * matrix;
  for (Eigen::Index i = 0; i < g.rows(); ++i) g(i, i) = g(i, i).real();
  return HermitianMatrix(g);
}

EigenSpectrum eigh(const HermitianMatrix& matrix, const JacobiOptions& options) {
  CMatrix a = matrix.matrix();
  const Eigen::Index n = a.rows();
  CMatrix v = CMatrix::Identity(n, n);

  const double initial_off = off_diagonal_norm(a);
  // Target never lies below the rounding level n * eps * ||A||_F.
  const double rounding_floor = static_cast<double>(n) * std::numeric_limits<double>::epsilon() * a.norm();
  const double threshold = std::max(options.relative_tolerance * initial_off, rounding_floor);
  double off = initial_off;
  bool converged = off <= threshold;

  for (int sweep = 0; sweep < options.max_sweeps && !converged; ++sweep) {
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const std::complex<double> apq = a(p, q);
        const double r = std::abs(apq);
        if (r == 0.0) continue;
        // Phase-rotate column q so the (p, q) entry is real, then apply a
        // real Jacobi rotation that annihilates it.
        const std::complex<double> w = std::conj(apq) / r;  // e^{-i phi}
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double theta = (aqq - app) / (2.0 * r);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        for (Eigen::Index k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const std::complex<double> akp = a(k, p);
          const std::complex<double> akq = a(k, q) * w;
          const std::complex<double> new_kp = c * akp - s * akq;
          const std::complex<double> new_kq = c * akq + s * akp;
          a(k, p) = new_kp;
          a(p, k) = std::conj(new_kp);
          a(k, q) = new_kq;
          a(q, k) = std::conj(new_kq);
        }
        a(p, p) = app - t * r;
        a(q, q) = aqq + t * r;
        a(p, q) = 0.0;
        a(q, p) = 0.0;

        for (Eigen::Index k = 0; k < n; ++k) {
          const std::complex<double> vkp = v(k, p);
          const std::complex<double> vkq = v(k, q) * w;
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = c * vkq + s * vkp;
        }
      }
    }
    off = off_diagonal_norm(a);
    converged = off <= threshold;
  }
  if (!converged) {
    throw Error(ErrorKind::kConvergence, "Jacobi eigensolver did not converge in " +
                                             std::to_string(options.max_sweeps) +
                                             " sweeps; off-diagonal residual " + std::to_string(off));
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index i, Eigen::Index j) { return a(i, i).real() > a(j, j).real(); });

  EigenSpectrum out;
  out.values.resize(n);
  out.basis.resize(n, n);
  double largest = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) largest = std::max(largest, std::abs(a(i, i).real()));
  for (Eigen::Index j = 0; j < n; ++j) {
    const Eigen::Index src = order[static_cast<std::size_t>(j)];
    double value = a(src, src).real();
    if (value < 0.0 && value >= -kEigenClampRatio * largest) value = 0.0;
    out.values(j) = value;
    out.basis.col(j) = v.col(src);
  }
  normalize_phase(out.basis);
  return out;
}

double frobenius_norm_sq(const CMatrix& matrix) {
  if (!all_finite(matrix)) throw Error(ErrorKind::kInvalidInput, "matrix has non-finite entries");
  return matrix.squaredNorm();
}

RVector clamped_values(const EigenSpectrum& spectrum) {
  RVector out = spectrum.values;
  if (out.size() == 0) return out;
  const double lambda_max = out(0);
  if (!(lambda_max > 0.0)) return RVector::Zero(out.size());
  for (Eigen::Index i = 0; i < out.size(); ++i)
    if (out(i) < kEigenClampRatio * lambda_max) out(i) = 0.0;
  return out;
}

Eigen::Index numerical_rank(const EigenSpectrum& spectrum) {
  const RVector v = clamped_values(spectrum);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (v(i) > 0.0) ++rank;
  return rank;
}

CMatrix psd_sqrt(const HermitianMatrix& matrix) {
  const EigenSpectrum s = eigh(matrix);
  RVector roots(s.dim());
  for (Eigen::Index i = 0; i < s.dim(); ++i) roots(i) = std::sqrt(std::max(s.values(i), 0.0));
  return s.basis * roots.asDiagonal() * s.basis.adjoint();
}

}  // namespace mimoscope

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

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "mimoscope/geometry.hpp"
#include "mimoscope/linalg.hpp"
#include "mimoscope/tensor.hpp"

namespace mimoscope {

/// A channel tensor scaled so its mean |h|^2 over all n, f, m equals one.
/// Only normalize() creates these.
class NormalizedTensor {
 public:
  const ChannelTensor& tensor() const noexcept { return tensor_; }
  /// RMS factor that was divided out of the raw tensor.
  double rms_scale() const noexcept { return rms_scale_; }

  std::size_t snapshots() const noexcept { return tensor_.snapshots(); }
  std::size_t freqs() const noexcept { return tensor_.freqs(); }
  std::size_t antennas() const noexcept { return tensor_.antennas(); }

 private:
  friend NormalizedTensor normalize(const ChannelTensor& tensor);
  NormalizedTensor(ChannelTensor tensor, double rms_scale) : tensor_(std::move(tensor)), rms_scale_(rms_scale) {}

  ChannelTensor tensor_;
  double rms_scale_ = 1.0;
};

/// Instantaneous channel gain per (n, f), flattened n-major.
struct GainSeries {
  std::vector<double> values;
  std::size_t antenna_count = 0;
};

/// Divides every sample by sqrt(mean |h|^2). Throws kDegenerateInput for an
/// all-zero tensor.
NormalizedTensor normalize(const ChannelTensor& tensor);

/// G(n, f) = (1/M) sum_m |h_m(n, f)|^2 over all antennas.
GainSeries instantaneous_gain(const NormalizedTensor& tensor);

/// Gain over the first m canonical antennas, rescaled so the series mean is 1.
GainSeries subset_gain(const NormalizedTensor& tensor, const ArrayGeometry& geometry, std::size_t m);

double mean_gain(const GainSeries& series);

/// Population standard deviation (divisor N*F). Needs at least two values.
double gain_std(const GainSeries& series);

/// Var / E^2 of the gain series; the asymptotic hardening criterion.
double hardening_ratio(const GainSeries& series);

double subset_gain_std(const NormalizedTensor& tensor, const ArrayGeometry& geometry, std::size_t m);

/// 10 log10(sigma_1 / sigma_m) with sigma_j the gain std over the first j
/// canonical antennas.
double hardening_db(const NormalizedTensor& tensor, const ArrayGeometry& geometry, std::size_t m);

/// |a^H b| / (|a| |b|), in [0, 1]. Exactly 1 for single-antenna inputs.
double correlation_coefficient(std::span<const Complex> a, std::span<const Complex> b);

/// (1/L) sum over the window of h(n, f) h(n, f)^H at one frequency.
HermitianMatrix correlation_matrix(const NormalizedTensor& tensor, const TimeWindow& window, std::size_t f);

/// lambda_min / lambda_max of channels^H channels after clamping.
double inverse_condition_number(const CMatrix& channels);

bool has_orthonormal_columns(const CMatrix& u, double tolerance = 1e-8);

/// || Ui Ui^H - Uj Uj^H ||_F^2, evaluated as 2p - 2 ||Ui^H Uj||_F^2 and
/// clamped to [0, 2p]. Inputs must have orthonormal columns.
double chordal_distance(const CMatrix& ui, const CMatrix& uj);

/// First p eigenvectors. Throws kInsufficientRank if the p-th eigenvalue
/// clamps to zero.
CMatrix dominant_eigenspace(const EigenSpectrum& spectrum, std::size_t p);

double eigen_energy_fraction(const EigenSpectrum& spectrum, std::size_t p);

/// Time-averaged raw gain per antenna (physical element order) in dB.
/// Antennas without energy are reported as nullopt.
std::vector<std::optional<double>> per_antenna_mean_gain_db(const ChannelTensor& tensor);

double array_gain_db(std::size_t m);

}  // namespace mimoscope

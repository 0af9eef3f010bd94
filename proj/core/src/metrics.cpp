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

#include "mimoscope/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mimoscope/error.hpp"
#include "mimoscope/stats.hpp"

namespace mimoscope {

NormalizedTensor normalize(const ChannelTensor& tensor) {
  const auto data = tensor.data();
  std::vector<double> power(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) power[i] = std::norm(data[i]);
  const double mean_power = mean_of(power);
  if (!(mean_power > 0.0)) {
    throw Error(ErrorKind::kDegenerateInput, "cannot normalize an all-zero tensor", tensor.position_id());
  }
  const double scale = std::sqrt(mean_power);
  std::vector<Complex> scaled(data.begin(), data.end());
  for (auto& h : scaled) h /= scale;
  return NormalizedTensor(
      ChannelTensor(tensor.position_id(), tensor.snapshots(), tensor.freqs(), tensor.antennas(), std::move(scaled)),
      scale);
}

GainSeries instantaneous_gain(const NormalizedTensor& normalized) {
  const ChannelTensor& t = normalized.tensor();
  GainSeries series;
  series.antenna_count = t.antennas();
  series.values.reserve(t.snapshots() * t.freqs());
  for (std::size_t n = 0; n < t.snapshots(); ++n) {
    for (std::size_t f = 0; f < t.freqs(); ++f) {
      double sum = 0.0;
      for (const Complex& h : t.antenna_vector(n, f)) sum += std::norm(h);
      series.values.push_back(sum / static_cast<double>(t.antennas()));
    }
  }
  return series;
}

GainSeries subset_gain(const NormalizedTensor& normalized, const ArrayGeometry& geometry, std::size_t m) {
  const ChannelTensor& t = normalized.tensor();
  if (geometry.size() != t.antennas()) {
    throw Error(ErrorKind::kInvalidInput, "geometry does not match tensor antenna count", t.position_id());
  }
  const auto elements = geometry.element_indices(0, m);
  GainSeries series;
  series.antenna_count = m;
  series.values.reserve(t.snapshots() * t.freqs());
  for (std::size_t n = 0; n < t.snapshots(); ++n) {
    for (std::size_t f = 0; f < t.freqs(); ++f) {
      const auto v = t.antenna_vector(n, f);
      double sum = 0.0;
      for (std::size_t e : elements) sum += std::norm(v[e]);
      series.values.push_back(sum / static_cast<double>(m));
    }
  }
  const double mu = mean_of(series.values);
  if (!(mu > 0.0)) {
    throw Error(ErrorKind::kDegenerateInput, "antenna subset carries no energy", t.position_id());
  }
  for (double& g : series.values) g /= mu;
  return series;
}

double mean_gain(const GainSeries& series) {
  if (series.values.empty()) throw Error(ErrorKind::kDegenerateInput, "empty gain series");
  return mean_of(series.values);
}

double gain_std(const GainSeries& series) {
  if (series.values.size() < 2) throw Error(ErrorKind::kDegenerateInput, "gain std needs at least two values");
  const double mu = mean_gain(series);
  std::vector<double> sq(series.values.size());
  for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = (series.values[i] - mu) * (series.values[i] - mu);
  return std::sqrt(mean_of(sq));
}

double hardening_ratio(const GainSeries& series) {
  const double mu = mean_gain(series);
  if (!(mu > 0.0)) throw Error(ErrorKind::kDegenerateInput, "gain series has zero mean");
  const double sigma = gain_std(series);
  return sigma * sigma / (mu * mu);
}

double subset_gain_std(const NormalizedTensor& tensor, const ArrayGeometry& geometry, std::size_t m) {
  return gain_std(subset_gain(tensor, geometry, m));
}

double hardening_db(const NormalizedTensor& tensor, const ArrayGeometry& geometry, std::size_t m) {
  const double sigma_one = subset_gain_std(tensor, geometry, 1);
  const double sigma_m = subset_gain_std(tensor, geometry, m);
  if (!(sigma_m > 0.0) || !(sigma_one > 0.0)) {
    throw Error(ErrorKind::kDegenerateInput, "channel gain has zero spread", tensor.tensor().position_id());
  }
  return 10.0 * std::log10(sigma_one / sigma_m);
}

double correlation_coefficient(std::span<const Complex> a, std::span<const Complex> b) {
  if (a.size() != b.size() || a.empty()) {
    throw Error(ErrorKind::kInvalidInput, "correlation needs two vectors of equal, nonzero length");
  }
  Complex inner = 0.0;
  double norm_a = 0.0;
  double norm_b = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    inner += std::conj(a[i]) * b[i];
    norm_a += std::norm(a[i]);
    norm_b += std::norm(b[i]);
  }
  if (!(norm_a > 0.0) || !(norm_b > 0.0)) {
    throw Error(ErrorKind::kDegenerateInput, "correlation of a zero-norm vector");
  }
  if (a.size() == 1) return 1.0;
  return std::min(1.0, std::abs(inner) / std::sqrt(norm_a * norm_b));
}

namespace {

void check_window(const NormalizedTensor& tensor, const TimeWindow& window) {
  if (window.length == 0 || window.start + window.length > tensor.snapshots()) {
    throw Error(ErrorKind::kOutOfRange, "window exceeds tensor snapshots", tensor.tensor().position_id());
  }
}

}  // namespace

HermitianMatrix correlation_matrix(const NormalizedTensor& tensor, const TimeWindow& window, std::size_t f) {
  check_window(tensor, window);
  if (f >= tensor.freqs()) throw Error(ErrorKind::kOutOfRange, "frequency index out of range");
  const auto m = static_cast<Eigen::Index>(tensor.antennas());
  CMatrix stacked(m, static_cast<Eigen::Index>(window.length));
  for (std::size_t l = 0; l < window.length; ++l) {
    const auto v = tensor.tensor().antenna_vector(window.start + l, f);
    for (Eigen::Index i = 0; i < m; ++i) stacked(i, static_cast<Eigen::Index>(l)) = v[static_cast<std::size_t>(i)];
  }
  CMatrix r = stacked * stacked.adjoint() / static_cast<double>(window.length);
  return HermitianMatrix(r);
}

double inverse_condition_number(const CMatrix& channels) {
  if (channels.rows() == 0 || channels.cols() == 0) {
    throw Error(ErrorKind::kInvalidInput, "channel matrix must be non-empty");
  }
  for (Eigen::Index k = 0; k < channels.cols(); ++k) {
    if (!(channels.col(k).squaredNorm() > 0.0)) {
      throw Error(ErrorKind::kDegenerateInput, "channel column " + std::to_string(k) + " is zero");
    }
  }
  const EigenSpectrum spectrum = eigh(gram(channels));
  const RVector values = clamped_values(spectrum);
  const double lambda_max = values(0);
  const double lambda_min = values(values.size() - 1);
  return std::clamp(lambda_min / lambda_max, 0.0, 1.0);
}

bool has_orthonormal_columns(const CMatrix& u, double tolerance) {
  if (u.cols() == 0 || u.cols() > u.rows()) return false;
  const CMatrix residual = u.adjoint() * u - CMatrix::Identity(u.cols(), u.cols());
  return std::sqrt(residual.squaredNorm()) <= tolerance;
}

double chordal_distance(const CMatrix& ui, const CMatrix& uj) {
  if (ui.rows() != uj.rows() || ui.cols() != uj.cols()) {
    throw Error(ErrorKind::kInvalidInput, "subspace bases must have the same shape");
  }
  if (!has_orthonormal_columns(ui) || !has_orthonormal_columns(uj)) {
    throw Error(ErrorKind::kInvalidInput, "subspace basis columns are not orthonormal");
  }
  const double p = static_cast<double>(ui.cols());
  const double overlap = (ui.adjoint() * uj).squaredNorm();
  return std::clamp(2.0 * p - 2.0 * overlap, 0.0, 2.0 * p);
}

CMatrix dominant_eigenspace(const EigenSpectrum& spectrum, std::size_t p) {
  if (p == 0 || p > static_cast<std::size_t>(spectrum.dim())) {
    throw Error(ErrorKind::kOutOfRange, "eigenspace dimension " + std::to_string(p) + " outside [1, " +
                                            std::to_string(spectrum.dim()) + "]");
  }
  const RVector values = clamped_values(spectrum);
  if (!(values(static_cast<Eigen::Index>(p) - 1) > 0.0)) {
    throw Error(ErrorKind::kInsufficientRank, "spectrum has rank " + std::to_string(numerical_rank(spectrum)) +
                                                  ", need " + std::to_string(p));
  }
  return spectrum.basis.leftCols(static_cast<Eigen::Index>(p));
}

double eigen_energy_fraction(const EigenSpectrum& spectrum, std::size_t p) {
  if (p == 0 || p > static_cast<std::size_t>(spectrum.dim())) {
    throw Error(ErrorKind::kOutOfRange, "eigenspace dimension outside spectrum");
  }
  const RVector values = clamped_values(spectrum);
  const double total = values.sum();
  if (!(total > 0.0)) throw Error(ErrorKind::kDegenerateInput, "spectrum carries no energy");
  return std::min(1.0, values.head(static_cast<Eigen::Index>(p)).sum() / total);
}

std::vector<std::optional<double>> per_antenna_mean_gain_db(const ChannelTensor& tensor) {
  const std::size_t samples = tensor.snapshots() * tensor.freqs();
  std::vector<std::optional<double>> out(tensor.antennas());
  std::vector<double> power(samples);
  for (std::size_t m = 0; m < tensor.antennas(); ++m) {
    std::size_t i = 0;
    for (std::size_t n = 0; n < tensor.snapshots(); ++n)
      for (std::size_t f = 0; f < tensor.freqs(); ++f) power[i++] = std::norm(tensor.at(n, f, m));
    const double mean = mean_of(power);
    if (mean > 0.0) out[m] = 10.0 * std::log10(mean);
  }
  return out;
}

double array_gain_db(std::size_t m) {
  if (m == 0) throw Error(ErrorKind::kInvalidInput, "antenna count must be positive");
  return 10.0 * std::log10(static_cast<double>(m));
}

}  // namespace mimoscope

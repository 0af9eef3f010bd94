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

#include "mimoscope/synth.hpp"

#include <cmath>
#include <numbers>

#include "mimoscope/error.hpp"
#include "mimoscope/linalg.hpp"

namespace mimoscope {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

CMatrix kronecker_root(std::size_t antennas, double rho) {
  const auto m = static_cast<Eigen::Index>(antennas);
  CMatrix r(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) r(i, j) = std::pow(rho, static_cast<double>(std::abs(i - j)));
  return psd_sqrt(HermitianMatrix(r));
}

}  // namespace

void ChannelModel::validate() const {
  if (antennas == 0 || snapshots == 0 || freqs == 0) {
    throw Error(ErrorKind::kConfiguration, "model extents (antennas, snapshots, freqs) must be positive");
  }
  std::visit(Overloaded{
                 [](const IidRayleigh&) {},
                 [](const KroneckerExponential& k) {
                   if (!(k.rho >= 0.0 && k.rho < 1.0)) {
                     throw Error(ErrorKind::kConfiguration, "Kronecker rho must lie in [0, 1)");
                   }
                 },
                 [](const SparseMultipath& s) {
                   if (s.steering_angles_rad.empty()) {
                     throw Error(ErrorKind::kConfiguration, "sparse multipath needs at least one path");
                   }
                   if (s.steering_angles_rad.size() != s.path_powers.size()) {
                     throw Error(ErrorKind::kConfiguration, "one power per steering angle is required");
                   }
                   for (double a : s.steering_angles_rad)
                     if (!std::isfinite(a)) throw Error(ErrorKind::kConfiguration, "steering angle not finite");
                   for (double p : s.path_powers)
                     if (!(p >= 0.0) || !std::isfinite(p)) {
                       throw Error(ErrorKind::kConfiguration, "path powers must be finite and nonnegative");
                     }
                   if (!(s.noise_floor >= 0.0) || !std::isfinite(s.noise_floor)) {
                     throw Error(ErrorKind::kConfiguration, "noise floor must be finite and nonnegative");
                   }
                 },
             },
             kind);
}

std::string model_name(const ChannelModel& model) {
  return std::visit(Overloaded{
                        [](const IidRayleigh&) { return std::string("iid"); },
                        [](const KroneckerExponential&) { return std::string("kronecker"); },
                        [](const SparseMultipath&) { return std::string("sparse"); },
                    },
                    model.kind);
}

std::vector<Complex> ula_steering_vector(std::size_t antennas, double angle_rad) {
  std::vector<Complex> a(antennas);
  const double step = std::numbers::pi * std::sin(angle_rad);
  for (std::size_t m = 0; m < antennas; ++m) a[m] = std::polar(1.0, step * static_cast<double>(m));
  return a;
}

ChannelGenerator::ChannelGenerator(ChannelModel model) : model_(std::move(model)) {
  model_.validate();
  if (const auto* k = std::get_if<KroneckerExponential>(&model_.kind)) {
    kronecker_root_ = kronecker_root(model_.antennas, k->rho);
  } else if (const auto* s = std::get_if<SparseMultipath>(&model_.kind)) {
    for (double angle : s->steering_angles_rad) steering_.push_back(ula_steering_vector(model_.antennas, angle));
  }
}

void ChannelGenerator::fill_snapshot(CounterRng& rng, std::size_t freqs, Complex* out) const {
  const std::size_t m_count = model_.antennas;
  std::visit(Overloaded{
                 [&](const IidRayleigh&) {
                   for (std::size_t i = 0; i < freqs * m_count; ++i) out[i] = rng.complex_normal();
                 },
                 [&](const KroneckerExponential&) {
                   CVector g(static_cast<Eigen::Index>(m_count));
                   for (std::size_t f = 0; f < freqs; ++f) {
                     for (Eigen::Index i = 0; i < g.size(); ++i) g(i) = rng.complex_normal();
                     const CVector h = kronecker_root_ * g;
                     for (std::size_t i = 0; i < m_count; ++i) out[f * m_count + i] = h(static_cast<Eigen::Index>(i));
                   }
                 },
                 [&](const SparseMultipath& s) {
                   const std::size_t paths = steering_.size();
                   const double noise_amplitude = std::sqrt(s.noise_floor);
                   std::vector<Complex> weights(paths);
                   for (std::size_t l = 0; l < paths; ++l) {
                     weights[l] = std::polar(std::sqrt(s.path_powers[l]), 2.0 * std::numbers::pi * rng.uniform());
                   }
                   for (std::size_t f = 0; f < freqs; ++f) {
                     for (std::size_t i = 0; i < m_count; ++i) {
                       Complex h = 0.0;
                       for (std::size_t l = 0; l < paths; ++l) h += weights[l] * steering_[l][i];
                       out[f * m_count + i] = h + noise_amplitude * rng.complex_normal();
                     }
                   }
                 },
             },
             model_.kind);
}

ChannelTensor ChannelGenerator::generate(RngSeed seed, std::string position_id) const {
  const std::size_t stride = model_.freqs * model_.antennas;
  std::vector<Complex> data(model_.snapshots * stride);
  CounterRng rng(seed);
  for (std::size_t n = 0; n < model_.snapshots; ++n) fill_snapshot(rng, model_.freqs, data.data() + n * stride);
  return ChannelTensor(std::move(position_id), model_.snapshots, model_.freqs, model_.antennas, std::move(data));
}

std::vector<Complex> ChannelGenerator::draw_vector(CounterRng& rng) const {
  std::vector<Complex> v(model_.antennas);
  fill_snapshot(rng, 1, v.data());
  return v;
}

ChannelTensor generate(const ChannelModel& model, RngSeed seed, std::string position_id) {
  return ChannelGenerator(model).generate(seed, std::move(position_id));
}

std::vector<Complex> pilot_estimate(std::span<const Complex> true_channel, std::span<const Complex> pilot,
                                    double noise_std, CounterRng& rng) {
  if (pilot.empty()) throw Error(ErrorKind::kInvalidInput, "pilot sequence is empty");
  if (!(noise_std >= 0.0) || !std::isfinite(noise_std)) {
    throw Error(ErrorKind::kInvalidInput, "noise std must be finite and nonnegative");
  }
  double energy = 0.0;
  for (const Complex& p : pilot) energy += std::norm(p);
  if (std::abs(energy - 1.0) > 1e-9) {
    throw Error(ErrorKind::kInvalidInput, "pilot energy is " + std::to_string(energy) + ", expected 1");
  }
  std::vector<Complex> estimate(true_channel.size());
  for (std::size_t m = 0; m < true_channel.size(); ++m) {
    Complex acc = 0.0;
    for (const Complex& p : pilot) {
      Complex y = true_channel[m] * p;
      if (noise_std > 0.0) y += noise_std * rng.complex_normal();
      acc += y * std::conj(p);
    }
    estimate[m] = acc;
  }
  return estimate;
}

}  // namespace mimoscope

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
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "mimoscope/linalg.hpp"
#include "mimoscope/rng.hpp"
#include "mimoscope/tensor.hpp"

namespace mimoscope {

struct IidRayleigh {};

/// Antenna correlation rho^|i - j| applied as R^{1/2} g.
struct KroneckerExponential {
  double rho = 0.0;
};

/// Sum of plane waves on a half-wavelength ULA plus complex Gaussian noise.
/// Each path gets an independent uniform phase per snapshot.
struct SparseMultipath {
  std::vector<double> steering_angles_rad;
  std::vector<double> path_powers;
  double noise_floor = 0.0;
};

using ChannelKind = std::variant<IidRayleigh, KroneckerExponential, SparseMultipath>;

struct ChannelModel {
  ChannelKind kind;
  std::size_t antennas = 0;
  std::size_t snapshots = 0;
  std::size_t freqs = 0;

  /// Throws kConfiguration on invalid parameters.
  void validate() const;
};

std::string model_name(const ChannelModel& model);

/// Validated model plus the per-model precomputation (Kronecker root,
/// steering vectors). Immutable; share freely across threads.
class ChannelGenerator {
 public:
  explicit ChannelGenerator(ChannelModel model);

  const ChannelModel& model() const noexcept { return model_; }

  /// Tensor of shape [snapshots][freqs][antennas], reproducible for a given seed.
  ChannelTensor generate(RngSeed seed, std::string position_id = "synthetic") const;

  /// One independent antenna vector (a single snapshot at a single frequency).
  std::vector<Complex> draw_vector(CounterRng& rng) const;

 private:
  void fill_snapshot(CounterRng& rng, std::size_t freqs, Complex* out) const;

  ChannelModel model_;
  CMatrix kronecker_root_;
  std::vector<std::vector<Complex>> steering_;
};

ChannelTensor generate(const ChannelModel& model, RngSeed seed, std::string position_id = "synthetic");

/// exp(i pi m sin(theta)) for m = 0..M-1.
std::vector<Complex> ula_steering_vector(std::size_t antennas, double angle_rad);

/// Simulates y_m = h_m phi + w_m with w ~ CN(0, noise_std^2) per pilot
/// sample and returns y_m phi^H. The pilot must have unit energy.
std::vector<Complex> pilot_estimate(std::span<const Complex> true_channel, std::span<const Complex> pilot,
                                    double noise_std, CounterRng& rng);

}  // namespace mimoscope

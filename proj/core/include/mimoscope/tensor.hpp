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

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "mimoscope/geometry.hpp"

namespace mimoscope {

using Complex = std::complex<double>;

/// Complex channel estimates for one node position, laid out [n][f][m]
/// (snapshot-major, antenna fastest). Immutable after construction.
class ChannelTensor {
 public:
  ChannelTensor() = default;

  /// Throws kInvalidInput on zero extents or a length mismatch and
  /// kNonFinite on NaN/Inf samples.
  ChannelTensor(std::string position_id, std::size_t snapshots, std::size_t freqs, std::size_t antennas,
                std::vector<Complex> data);

  const std::string& position_id() const noexcept { return position_id_; }
  std::size_t snapshots() const noexcept { return snapshots_; }
  std::size_t freqs() const noexcept { return freqs_; }
  std::size_t antennas() const noexcept { return antennas_; }
  std::size_t size() const noexcept { return data_.size(); }

  const Complex& at(std::size_t n, std::size_t f, std::size_t m) const {
    return data_[(n * freqs_ + f) * antennas_ + m];
  }

  /// The M-element antenna vector at (n, f).
  std::span<const Complex> antenna_vector(std::size_t n, std::size_t f) const {
    return {data_.data() + (n * freqs_ + f) * antennas_, antennas_};
  }

  std::span<const Complex> data() const noexcept { return data_; }

  ChannelTensor with_position_id(std::string id) const;

 private:
  std::string position_id_;
  std::size_t snapshots_ = 0;
  std::size_t freqs_ = 0;
  std::size_t antennas_ = 0;
  std::vector<Complex> data_;
};

struct TimeWindow {
  std::size_t start = 0;
  std::size_t length = 0;

  friend bool operator==(const TimeWindow&, const TimeWindow&) = default;
};

/// Restricts the tensor to canonical antennas start_index .. start_index+count-1.
/// The result's antenna axis is in canonical order. Throws kOutOfRange.
ChannelTensor select_antennas(const ChannelTensor& tensor, const ArrayGeometry& geometry, std::size_t count,
                              std::size_t start_index = 0);

/// Non-overlapping windows of exactly window_length snapshots; a short
/// trailing remainder is dropped. Empty when window_length > N.
std::vector<TimeWindow> segment_windows(const ChannelTensor& tensor, std::size_t window_length);

/// Copies the snapshots covered by window into a new tensor.
ChannelTensor slice_window(const ChannelTensor& tensor, const TimeWindow& window);

}  // namespace mimoscope

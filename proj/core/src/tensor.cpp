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

#include "mimoscope/tensor.hpp"

#include <cmath>

#include "mimoscope/error.hpp"

namespace mimoscope {

ChannelTensor::ChannelTensor(std::string position_id, std::size_t snapshots, std::size_t freqs,
                             std::size_t antennas, std::vector<Complex> data)
    : position_id_(std::move(position_id)),
      snapshots_(snapshots),
      freqs_(freqs),
      antennas_(antennas),
      data_(std::move(data)) {
  if (snapshots_ == 0 || freqs_ == 0 || antennas_ == 0) {
    throw Error(ErrorKind::kInvalidInput, "tensor extents must be positive", position_id_);
  }
  if (data_.size() != snapshots_ * freqs_ * antennas_) {
    throw Error(ErrorKind::kInvalidInput,
                "data length " + std::to_string(data_.size()) + " does not match " + std::to_string(snapshots_) +
                    "x" + std::to_string(freqs_) + "x" + std::to_string(antennas_),
                position_id_);
  }
  for (std::size_t i = 0; i < data_.size(); ++i) {
    if (!std::isfinite(data_[i].real()) || !std::isfinite(data_[i].imag())) {
      throw Error(ErrorKind::kNonFinite, "sample " + std::to_string(i) + " is not finite", position_id_);
    }
  }
}

ChannelTensor ChannelTensor::with_position_id(std::string id) const {
  ChannelTensor out = *this;
  out.position_id_ = std::move(id);
  return out;
}

ChannelTensor select_antennas(const ChannelTensor& tensor, const ArrayGeometry& geometry, std::size_t count,
                              std::size_t start_index) {
  if (geometry.size() != tensor.antennas()) {
    throw Error(ErrorKind::kInvalidInput,
                "geometry has " + std::to_string(geometry.size()) + " elements, tensor has " +
                    std::to_string(tensor.antennas()),
                tensor.position_id());
  }
  const auto elements = geometry.element_indices(start_index, count);
  std::vector<Complex> data;
  data.reserve(tensor.snapshots() * tensor.freqs() * count);
  for (std::size_t n = 0; n < tensor.snapshots(); ++n) {
    for (std::size_t f = 0; f < tensor.freqs(); ++f) {
      const auto v = tensor.antenna_vector(n, f);
      for (std::size_t e : elements) data.push_back(v[e]);
    }
  }
  return ChannelTensor(tensor.position_id(), tensor.snapshots(), tensor.freqs(), count, std::move(data));
}

std::vector<TimeWindow> segment_windows(const ChannelTensor& tensor, std::size_t window_length) {
  if (window_length == 0) throw Error(ErrorKind::kInvalidInput, "window length must be at least 1");
  std::vector<TimeWindow> windows;
  const std::size_t count = tensor.snapshots() / window_length;
  windows.reserve(count);
  for (std::size_t w = 0; w < count; ++w) windows.push_back({w * window_length, window_length});
  return windows;
}

ChannelTensor slice_window(const ChannelTensor& tensor, const TimeWindow& window) {
  if (window.length == 0 || window.start + window.length > tensor.snapshots()) {
    throw Error(ErrorKind::kOutOfRange, "window exceeds tensor snapshots", tensor.position_id());
  }
  const std::size_t stride = tensor.freqs() * tensor.antennas();
  const auto src = tensor.data();
  std::vector<Complex> data(src.begin() + static_cast<std::ptrdiff_t>(window.start * stride),
                            src.begin() + static_cast<std::ptrdiff_t>((window.start + window.length) * stride));
  return ChannelTensor(tensor.position_id(), window.length, tensor.freqs(), tensor.antennas(), std::move(data));
}

}  // namespace mimoscope

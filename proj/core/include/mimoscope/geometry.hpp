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
#include <string_view>
#include <vector>

namespace mimoscope {

enum class ArrayKind { kUla, kUra };

std::string_view to_string(ArrayKind kind);
ArrayKind parse_array_kind(std::string_view text);

struct ElementPosition {
  std::size_t row = 0;
  std::size_t col = 0;

  friend bool operator==(const ElementPosition&, const ElementPosition&) = default;
};

/// Planar array layout plus the canonical antenna numbering.
///
/// Tensors store the antenna axis by physical element index
/// (row * cols + col). The numbering maps a canonical index, the order in
/// which "the first m antennas" are taken, to a physical element.
class ArrayGeometry {
 public:
  ArrayGeometry() = default;

  /// Validates the layout: ULA has one row, the numbering is a bijection
  /// over rows * cols elements. Throws Error(kValidation) otherwise.
  ArrayGeometry(ArrayKind kind, std::size_t rows, std::size_t cols,
                std::vector<ElementPosition> numbering, double spacing_wavelengths = 0.5);

  static ArrayGeometry ula(std::size_t elements);

  ArrayKind kind() const noexcept { return kind_; }
  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return rows_ * cols_; }
  double spacing_wavelengths() const noexcept { return spacing_; }
  const std::vector<ElementPosition>& numbering() const noexcept { return numbering_; }

  ElementPosition position_of(std::size_t canonical) const { return numbering_.at(canonical); }
  std::size_t element_index(std::size_t canonical) const;

  /// Physical element indices of canonical antennas [start, start + count).
  std::vector<std::size_t> element_indices(std::size_t start, std::size_t count) const;

  friend bool operator==(const ArrayGeometry&, const ArrayGeometry&) = default;

 private:
  ArrayKind kind_ = ArrayKind::kUla;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  double spacing_ = 0.5;
  std::vector<ElementPosition> numbering_;
};

/// Default numbering for a physical array.
///
/// ULA: canonical index m is element m along the line.
/// URA: column-major, following the two-element holders stacked vertically;
/// indices 0..rows-1 fill column 0 top to bottom, then column 1, and so on.
ArrayGeometry canonical_numbering(ArrayKind kind, std::size_t rows, std::size_t cols);

}  // namespace mimoscope

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

#include "mimoscope/geometry.hpp"

#include <string>

#include "mimoscope/error.hpp"

namespace mimoscope {

std::string_view to_string(ArrayKind kind) { return kind == ArrayKind::kUla ? "ULA" : "URA"; }

ArrayKind parse_array_kind(std::string_view text) {
  if (text == "ULA" || text == "ula") return ArrayKind::kUla;
  if (text == "URA" || text == "ura") return ArrayKind::kUra;
  throw Error(ErrorKind::kValidation, "unknown array kind '" + std::string(text) + "'");
}

ArrayGeometry::ArrayGeometry(ArrayKind kind, std::size_t rows, std::size_t cols,
                             std::vector<ElementPosition> numbering, double spacing_wavelengths)
    : kind_(kind), rows_(rows), cols_(cols), spacing_(spacing_wavelengths), numbering_(std::move(numbering)) {
  if (rows_ == 0 || cols_ == 0) throw Error(ErrorKind::kValidation, "array must have at least one row and column");
  if (kind_ == ArrayKind::kUla && rows_ != 1) throw Error(ErrorKind::kValidation, "a ULA has exactly one row");
  if (!(spacing_ > 0.0)) throw Error(ErrorKind::kValidation, "element spacing must be positive");
  if (numbering_.size() != size()) {
    throw Error(ErrorKind::kValidation, "numbering has " + std::to_string(numbering_.size()) +
                                            " entries, array has " + std::to_string(size()) + " elements");
  }
  std::vector<bool> seen(size(), false);
  for (const auto& p : numbering_) {
    if (p.row >= rows_ || p.col >= cols_) throw Error(ErrorKind::kValidation, "numbering entry outside the array");
    const std::size_t e = p.row * cols_ + p.col;
    if (seen[e]) throw Error(ErrorKind::kValidation, "numbering is not a bijection");
    seen[e] = true;
  }
}

ArrayGeometry ArrayGeometry::ula(std::size_t elements) { return canonical_numbering(ArrayKind::kUla, 1, elements); }

std::size_t ArrayGeometry::element_index(std::size_t canonical) const {
  if (canonical >= numbering_.size()) {
    throw Error(ErrorKind::kOutOfRange, "antenna index " + std::to_string(canonical) + " outside array of " +
                                            std::to_string(numbering_.size()));
  }
  const auto& p = numbering_[canonical];
  return p.row * cols_ + p.col;
}

std::vector<std::size_t> ArrayGeometry::element_indices(std::size_t start, std::size_t count) const {
  if (count == 0 || start + count > size()) {
    throw Error(ErrorKind::kOutOfRange, "antenna range [" + std::to_string(start) + ", " +
                                            std::to_string(start + count) + ") outside array of " +
                                            std::to_string(size()));
  }
  std::vector<std::size_t> out;
  out.reserve(count);
  for (std::size_t k = start; k < start + count; ++k) out.push_back(element_index(k));
  return out;
}

ArrayGeometry canonical_numbering(ArrayKind kind, std::size_t rows, std::size_t cols) {
  std::vector<ElementPosition> numbering;
  numbering.reserve(rows * cols);
  if (kind == ArrayKind::kUla) {
    for (std::size_t c = 0; c < cols; ++c) numbering.push_back({0, c});
  } else {
    for (std::size_t c = 0; c < cols; ++c)
      for (std::size_t r = 0; r < rows; ++r) numbering.push_back({r, c});
  }
  return ArrayGeometry(kind, rows, cols, std::move(numbering));
}

}  // namespace mimoscope

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

#include "mimoscope/error.hpp"

namespace mimoscope {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidInput: return "invalid input";
    case ErrorKind::kOutOfRange: return "out of range";
    case ErrorKind::kDegenerateInput: return "degenerate input";
    case ErrorKind::kConvergence: return "convergence failure";
    case ErrorKind::kInsufficientRank: return "insufficient rank";
    case ErrorKind::kInsufficientData: return "insufficient data";
    case ErrorKind::kConfiguration: return "configuration error";
    case ErrorKind::kIo: return "I/O error";
    case ErrorKind::kMissingFile: return "missing file";
    case ErrorKind::kSizeMismatch: return "size mismatch";
    case ErrorKind::kNonFinite: return "non-finite sample";
    case ErrorKind::kVersionMismatch: return "version mismatch";
    case ErrorKind::kParse: return "parse error";
    case ErrorKind::kValidation: return "validation error";
  }
  return "unknown error";
}

namespace {

std::string compose(ErrorKind kind, const std::string& message, const std::string& position_id) {
  std::string out(to_string(kind));
  if (!position_id.empty()) {
    out += " [position ";
    out += position_id;
    out += "]";
  }
  out += ": ";
  out += message;
  return out;
}

}  // namespace

Error::Error(ErrorKind kind, const std::string& message, std::string position_id)
    : std::runtime_error(compose(kind, message, position_id)),
      kind_(kind),
      position_id_(std::move(position_id)) {}

}  // namespace mimoscope

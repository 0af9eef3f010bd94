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

#include <stdexcept>
#include <string>
#include <string_view>

namespace mimoscope {

enum class ErrorKind {
  kInvalidInput,
  kOutOfRange,
  kDegenerateInput,
  kConvergence,
  kInsufficientRank,
  kInsufficientData,
  kConfiguration,
  kIo,
  kMissingFile,
  kSizeMismatch,
  kNonFinite,
  kVersionMismatch,
  kParse,
  kValidation,
};

std::string_view to_string(ErrorKind kind);

/// Single exception type for the library; callers branch on kind().
/// position_id() is set for dataset errors that concern one position.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, std::string position_id = {});

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& position_id() const noexcept { return position_id_; }

 private:
  ErrorKind kind_;
  std::string position_id_;
};

}  // namespace mimoscope

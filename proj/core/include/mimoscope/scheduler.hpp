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
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mimoscope/experiments.hpp"
#include "mimoscope/linalg.hpp"

namespace mimoscope {

/// Dominant p-dimensional eigenspace of one node's correlation matrix.
struct NodeSignature {
  std::string position_id;
  CMatrix eigenspace;  // M x p, orthonormal columns
  double energy_fraction = 0.0;

  std::size_t dimension() const noexcept { return static_cast<std::size_t>(eigenspace.cols()); }
};

struct SkippedPosition {
  std::string position_id;
  std::string reason;
};

struct SignatureSet {
  std::vector<NodeSignature> signatures;
  std::vector<SkippedPosition> skipped;
};

/// One signature per position, from the correlation matrix of its first
/// complete window at the given frequency. Positions without a complete
/// window or with rank below p are skipped with a reason.
SignatureSet build_signatures(const ChannelSource& source, std::size_t window_length, std::size_t p,
                              std::size_t frequency = 0);

struct SchedulingGroup {
  std::vector<std::string> members;
  /// Smallest chordal distance between two members; empty for a singleton.
  std::optional<double> min_pairwise_chordal;
  std::size_t group_size = 0;
};

/// Separation score between two signatures; larger means easier to serve together.
using SignatureDistance = std::function<double(const NodeSignature&, const NodeSignature&)>;

double chordal_separation(const NodeSignature& a, const NodeSignature& b);

/// 1 - correlation coefficient of the principal eigenvectors.
double correlation_separation(const NodeSignature& a, const NodeSignature& b);

/// Greedy max-min grouping. Each group starts from the most separated
/// unassigned pair and grows by the unassigned signature whose minimum
/// distance to the members is largest. Ties go to the lowest position id.
/// Every signature lands in exactly one group; the last may be smaller.
std::vector<SchedulingGroup> greedy_group(const std::vector<NodeSignature>& signatures, std::size_t group_size,
                                          const SignatureDistance& distance = chordal_separation);

/// {"p": p, "groups": [{"members": [...], "group_size": n, "min_pairwise_chordal": x|null}]}
std::string groups_to_json(const std::vector<SchedulingGroup>& groups, std::size_t p,
                           const std::vector<SkippedPosition>& skipped = {});

}  // namespace mimoscope

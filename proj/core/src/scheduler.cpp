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

#include "mimoscope/scheduler.hpp"

#include <algorithm>
#include <nlohmann/json.hpp>
#include <numeric>

#include "mimoscope/error.hpp"
#include "mimoscope/metrics.hpp"

namespace mimoscope {

SignatureSet build_signatures(const ChannelSource& source, std::size_t window_length, std::size_t p,
                              std::size_t frequency) {
  if (p == 0) throw Error(ErrorKind::kConfiguration, "p must be >= 1");
  if (window_length == 0) throw Error(ErrorKind::kConfiguration, "window length must be >= 1");
  SignatureSet set;
  for (std::size_t k = 0; k < source.position_count(); ++k) {
    const ChannelTensor tensor = source.position(k);
    const auto windows = segment_windows(tensor, window_length);
    if (windows.empty()) {
      set.skipped.push_back({tensor.position_id(), "no complete window"});
      continue;
    }
    if (p > tensor.antennas()) {
      set.skipped.push_back({tensor.position_id(), "p exceeds the antenna count"});
      continue;
    }
    const NormalizedTensor nt = normalize(tensor);
    const EigenSpectrum spectrum = eigh(correlation_matrix(nt, windows.front(), frequency));
    try {
      set.signatures.push_back(
          {tensor.position_id(), dominant_eigenspace(spectrum, p), eigen_energy_fraction(spectrum, p)});
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kInsufficientRank) throw;
      set.skipped.push_back({tensor.position_id(), e.what()});
    }
  }
  return set;
}

double chordal_separation(const NodeSignature& a, const NodeSignature& b) {
  return chordal_distance(a.eigenspace, b.eigenspace);
}

double correlation_separation(const NodeSignature& a, const NodeSignature& b) {
  const auto m = static_cast<std::size_t>(a.eigenspace.rows());
  return 1.0 - correlation_coefficient({a.eigenspace.col(0).data(), m}, {b.eigenspace.col(0).data(), m});
}

std::vector<SchedulingGroup> greedy_group(const std::vector<NodeSignature>& signatures, std::size_t group_size,
                                          const SignatureDistance& distance) {
  if (group_size < 2) throw Error(ErrorKind::kConfiguration, "group size must be >= 2");
  const std::size_t n = signatures.size();
  if (n < group_size) {
    throw Error(ErrorKind::kInsufficientData, "need at least " + std::to_string(group_size) + " signatures, have " +
                                                  std::to_string(n));
  }

  // Visit signatures by ascending id so that the first maximum found wins ties.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return signatures[a].position_id < signatures[b].position_id;
  });

  std::vector<double> dist(n * n, 0.0);
  std::vector<double> chordal(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      dist[i * n + j] = dist[j * n + i] = distance(signatures[i], signatures[j]);
      chordal[i * n + j] = chordal[j * n + i] = chordal_distance(signatures[i].eigenspace, signatures[j].eigenspace);
    }
  }

  std::vector<bool> assigned(n, false);
  std::size_t remaining = n;
  std::vector<SchedulingGroup> groups;
  while (remaining > 0) {
    std::vector<std::size_t> members;
    if (remaining == 1) {
      for (std::size_t i : order)
        if (!assigned[i]) members.push_back(i);
    } else {
      std::size_t best_a = n, best_b = n;
      double best = -1.0;
      for (std::size_t x = 0; x < n; ++x) {
        const std::size_t a = order[x];
        if (assigned[a]) continue;
        for (std::size_t y = x + 1; y < n; ++y) {
          const std::size_t b = order[y];
          if (assigned[b]) continue;
          if (dist[a * n + b] > best) {
            best = dist[a * n + b];
            best_a = a;
            best_b = b;
          }
        }
      }
      members = {best_a, best_b};
      assigned[best_a] = assigned[best_b] = true;
      while (members.size() < group_size && members.size() < remaining) {
        std::size_t pick = n;
        double pick_score = -1.0;
        for (std::size_t c : order) {
          if (assigned[c]) continue;
          double score = std::numeric_limits<double>::infinity();
          for (std::size_t mbr : members) score = std::min(score, dist[c * n + mbr]);
          if (score > pick_score) {
            pick_score = score;
            pick = c;
          }
        }
        members.push_back(pick);
        assigned[pick] = true;
      }
    }
    for (std::size_t i : members) assigned[i] = true;
    remaining -= members.size();

    SchedulingGroup g;
    g.group_size = members.size();
    for (std::size_t i : members) g.members.push_back(signatures[i].position_id);
    for (std::size_t x = 0; x < members.size(); ++x) {
      for (std::size_t y = x + 1; y < members.size(); ++y) {
        const double d = chordal[members[x] * n + members[y]];
        g.min_pairwise_chordal = g.min_pairwise_chordal ? std::min(*g.min_pairwise_chordal, d) : d;
      }
    }
    groups.push_back(std::move(g));
  }
  return groups;
}

std::string groups_to_json(const std::vector<SchedulingGroup>& groups, std::size_t p,
                           const std::vector<SkippedPosition>& skipped) {
  nlohmann::json j;
  j["p"] = p;
  j["groups"] = nlohmann::json::array();
  for (const auto& g : groups) {
    nlohmann::json e;
    e["members"] = g.members;
    e["group_size"] = g.group_size;
    e["min_pairwise_chordal"] = g.min_pairwise_chordal ? nlohmann::json(*g.min_pairwise_chordal) : nlohmann::json();
    j["groups"].push_back(std::move(e));
  }
  j["skipped"] = nlohmann::json::array();
  for (const auto& s : skipped) j["skipped"].push_back({{"position_id", s.position_id}, {"reason", s.reason}});
  return j.dump(2) + "\n";
}

}  // namespace mimoscope

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

#include <doctest.h>

#include <algorithm>
#include <nlohmann/json.hpp>
#include <set>

#include "fixtures.hpp"
#include "mimoscope/metrics.hpp"
#include "mimoscope/scheduler.hpp"
#include "oracles.hpp"

using namespace mimoscope;
using fixture::kind_of;

namespace {

NodeSignature signature(std::string id, CMatrix u) { return NodeSignature{std::move(id), std::move(u), 1.0}; }

void check_partition(const std::vector<SchedulingGroup>& groups, const std::vector<NodeSignature>& sigs,
                     std::size_t group_size) {
  std::multiset<std::string> seen;
  for (const auto& g : groups) {
    CHECK(g.members.size() <= group_size);
    CHECK(g.group_size == g.members.size());
    for (const auto& m : g.members) seen.insert(m);
    if (g.members.size() > 1) {
      REQUIRE(g.min_pairwise_chordal.has_value());
      CHECK(*g.min_pairwise_chordal >= 0.0);
    } else {
      CHECK_FALSE(g.min_pairwise_chordal.has_value());
    }
  }
  CHECK(seen.size() == sigs.size());
  for (const auto& s : sigs) CHECK(seen.count(s.position_id) == 1);
}

ChannelModel sparse_model() {
  ChannelModel model;
  model.kind = SparseMultipath{{-0.7, 0.0, 0.8}, {1.0, 0.6, 0.3}, 0.01};
  model.antennas = 16;
  model.snapshots = 600;
  model.freqs = 1;
  return model;
}

}  // namespace

TEST_SUITE("scheduler") {
  TEST_CASE("orthogonal subspaces pair at the maximum distance") {
    fixture::Random rng(71);
    const CMatrix q = rng.unitary(12);
    std::vector<NodeSignature> sigs;
    for (int k = 0; k < 4; ++k) sigs.push_back(signature("n" + std::to_string(k), q.middleCols(3 * k, 3)));
    const auto groups = greedy_group(sigs, 2);
    REQUIRE(groups.size() == 2);
    for (const auto& g : groups) CHECK(std::abs(*g.min_pairwise_chordal - 6.0) < 1e-9);
    check_partition(groups, sigs, 2);
  }

  TEST_CASE("identical signatures are never paired while an orthogonal partner exists") {
    fixture::Random rng(72);
    const CMatrix q = rng.unitary(9);
    const std::vector<NodeSignature> sigs{signature("a", q.leftCols(3)), signature("b", q.leftCols(3)),
                                          signature("c", q.middleCols(3, 3)), signature("d", q.rightCols(3))};
    const auto groups = greedy_group(sigs, 2);
    for (const auto& g : groups) {
      const std::set<std::string> members(g.members.begin(), g.members.end());
      CHECK_FALSE((members.count("a") && members.count("b")));
      CHECK(*g.min_pairwise_chordal > 5.9);
    }
  }

  TEST_CASE("group size equal to the count yields one group") {
    fixture::Random rng(73);
    std::vector<NodeSignature> sigs;
    for (int k = 0; k < 5; ++k) sigs.push_back(signature("n" + std::to_string(k), rng.orthonormal(8, 2)));
    const auto groups = greedy_group(sigs, 5);
    REQUIRE(groups.size() == 1);
    CHECK(groups[0].members.size() == 5);
  }

  TEST_CASE("odd counts leave a final singleton") {
    fixture::Random rng(74);
    std::vector<NodeSignature> sigs;
    for (int k = 0; k < 5; ++k) sigs.push_back(signature("n" + std::to_string(k), rng.orthonormal(8, 2)));
    const auto groups = greedy_group(sigs, 2);
    REQUIRE(groups.size() == 3);
    CHECK(groups.back().members.size() == 1);
    check_partition(groups, sigs, 2);
  }

  TEST_CASE("partition and seed-group properties against exhaustive search") {
    fixture::Random rng(75);
    for (int instance = 0; instance < 60; ++instance) {
      const int n = rng.integer(2, 8);
      std::vector<NodeSignature> sigs;
      for (int k = 0; k < n; ++k) sigs.push_back(signature("s" + std::to_string(k), rng.orthonormal(6, 2)));
      const auto groups = greedy_group(sigs, 2);
      check_partition(groups, sigs, 2);
      const auto d = [&](int a, int b) { return oracle::projector_chordal(sigs[a].eigenspace, sigs[b].eigenspace); };
      const double global_max = oracle::max_pair_distance(n, d);
      const double best = oracle::best_bottleneck_pairing(n, d);
      CHECK(std::abs(*groups[0].min_pairwise_chordal - global_max) < 1e-9);
      CHECK(*groups[0].min_pairwise_chordal >= best - 1e-9);
    }
  }

  TEST_CASE("larger groups remain partitions") {
    fixture::Random rng(76);
    std::vector<NodeSignature> sigs;
    for (int k = 0; k < 10; ++k) sigs.push_back(signature("g" + std::to_string(k), rng.orthonormal(8, 3)));
    check_partition(greedy_group(sigs, 3), sigs, 3);
    check_partition(greedy_group(sigs, 4, correlation_separation), sigs, 4);
  }

  TEST_CASE("ties go to the lowest position id regardless of input order") {
    fixture::Random rng(77);
    const CMatrix q = rng.unitary(8);
    std::vector<NodeSignature> sigs{signature("d", q.middleCols(6, 2)), signature("b", q.middleCols(2, 2)),
                                    signature("c", q.middleCols(4, 2)), signature("a", q.leftCols(2))};
    const auto g1 = greedy_group(sigs, 2);
    std::reverse(sigs.begin(), sigs.end());
    const auto g2 = greedy_group(sigs, 2);
    CHECK(g1[0].members == std::vector<std::string>{"a", "b"});
    CHECK(g1[1].members == std::vector<std::string>{"c", "d"});
    for (std::size_t i = 0; i < g1.size(); ++i) CHECK(g1[i].members == g2[i].members);
  }

  TEST_CASE("grouping errors") {
    fixture::Random rng(78);
    std::vector<NodeSignature> sigs{signature("a", rng.orthonormal(4, 1))};
    CHECK(kind_of([&] { greedy_group(sigs, 1); }) == ErrorKind::kConfiguration);
    CHECK(kind_of([&] { greedy_group(sigs, 2); }) == ErrorKind::kInsufficientData);
  }

  TEST_CASE("signatures from a sparse three-path source") {
    const auto source = ChannelSource::from_model(sparse_model(), ArrayGeometry::ula(16), 3, RngSeed{79, 0});
    const auto set = build_signatures(source, 600, 3);
    REQUIRE(set.signatures.size() == 3);
    CHECK(set.skipped.empty());
    for (const auto& s : set.signatures) {
      CHECK(s.energy_fraction >= 0.95);
      CHECK(has_orthonormal_columns(s.eigenspace));
      CHECK(s.dimension() == 3);
    }
  }

  TEST_CASE("identical positions have zero separation") {
    const auto t = ChannelGenerator(sparse_model()).generate(RngSeed{80, 0}, "x");
    std::vector<ChannelSource::Position> list{{t, std::nullopt, false}, {t.with_position_id("y"), std::nullopt, false}};
    const auto source = ChannelSource::from_tensors(std::move(list), ArrayGeometry::ula(16));
    const auto set = build_signatures(source, 600, 3);
    REQUIRE(set.signatures.size() == 2);
    CHECK(chordal_separation(set.signatures[0], set.signatures[1]) < 1e-9);
    CHECK(correlation_separation(set.signatures[0], set.signatures[1]) < 1e-9);
  }

  TEST_CASE("p above the window length skips every position") {
    const auto source = ChannelSource::from_model(sparse_model(), ArrayGeometry::ula(16), 3, RngSeed{81, 0});
    const auto set = build_signatures(source, 2, 3);
    CHECK(set.signatures.empty());
    REQUIRE(set.skipped.size() == 3);
    for (const auto& s : set.skipped) CHECK(s.reason.find("rank") != std::string::npos);
    const auto none = build_signatures(source, 601, 3);
    CHECK(none.skipped.size() == 3);
  }

  TEST_CASE("group JSON") {
    std::vector<SchedulingGroup> groups{{{"a", "b"}, 5.5, 2}, {{"c"}, std::nullopt, 1}};
    const auto j = nlohmann::json::parse(groups_to_json(groups, 3, {{"z", "rank 1 < p"}}));
    CHECK(j["p"] == 3);
    CHECK(j["groups"][0]["members"] == nlohmann::json({"a", "b"}));
    CHECK(j["groups"][0]["min_pairwise_chordal"] == 5.5);
    CHECK(j["groups"][1]["min_pairwise_chordal"].is_null());
    CHECK(j["skipped"][0]["position_id"] == "z");
  }
}

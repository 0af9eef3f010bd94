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

#include <benchmark/benchmark.h>

#include "mimoscope/experiments.hpp"
#include "mimoscope/metrics.hpp"
#include "mimoscope/synth.hpp"

namespace {

using namespace mimoscope;

ChannelModel iid_model(std::size_t m, std::size_t n, std::size_t f) {
  ChannelModel model;
  model.kind = IidRayleigh{};
  model.antennas = m;
  model.snapshots = n;
  model.freqs = f;
  return model;
}

CMatrix random_hermitian(Eigen::Index n, std::uint64_t seed) {
  CounterRng rng(RngSeed{seed, 0});
  CMatrix a(n, n);
  for (Eigen::Index c = 0; c < n; ++c)
    for (Eigen::Index r = 0; r < n; ++r) a(r, c) = rng.complex_normal();
  return 0.5 * (a + a.adjoint());
}

void BM_Eigh(benchmark::State& state) {
  const HermitianMatrix h(random_hermitian(state.range(0), 1));
  for (auto _ : state) benchmark::DoNotOptimize(eigh(h));
}
BENCHMARK(BM_Eigh)->Arg(3)->Arg(8)->Arg(16)->Arg(32);

void BM_GenerateIid(benchmark::State& state) {
  const ChannelGenerator gen(iid_model(32, static_cast<std::size_t>(state.range(0)), 2));
  std::uint64_t k = 0;
  for (auto _ : state) benchmark::DoNotOptimize(gen.generate(RngSeed{2, k++}));
  state.SetItemsProcessed(state.iterations() * state.range(0) * 64);
}
BENCHMARK(BM_GenerateIid)->Arg(600)->Arg(6000);

void BM_GenerateKronecker(benchmark::State& state) {
  ChannelModel model = iid_model(32, 600, 2);
  model.kind = KroneckerExponential{0.6};
  const ChannelGenerator gen(model);
  std::uint64_t k = 0;
  for (auto _ : state) benchmark::DoNotOptimize(gen.generate(RngSeed{3, k++}));
}
BENCHMARK(BM_GenerateKronecker);

void BM_HardeningDb(benchmark::State& state) {
  const auto n = normalize(generate(iid_model(32, 600, 2), RngSeed{4, 0}));
  const auto geometry = ArrayGeometry::ula(32);
  for (auto _ : state) benchmark::DoNotOptimize(hardening_db(n, geometry, 31));
}
BENCHMARK(BM_HardeningDb);

void BM_CorrelationMatrixEigen(benchmark::State& state) {
  const auto n = normalize(generate(iid_model(32, 600, 1), RngSeed{5, 0}));
  for (auto _ : state) benchmark::DoNotOptimize(eigh(correlation_matrix(n, TimeWindow{0, 600}, 0)));
}
BENCHMARK(BM_CorrelationMatrixEigen);

void BM_HardeningCurve(benchmark::State& state) {
  const auto source = ChannelSource::from_model(iid_model(31, 6000, 2), ArrayGeometry::ula(31), 1, RngSeed{6, 0});
  HardeningOptions options;
  options.antenna_counts = {1, 2, 4, 8, 16, 31};
  options.trials = 10;
  options.threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run_hardening_curve(source, options, RngSeed{7, 0}));
}
BENCHMARK(BM_HardeningCurve)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_ConditionTrial(benchmark::State& state) {
  const auto source = ChannelSource::from_model(iid_model(32, 1, 1), ArrayGeometry::ula(32), 1, RngSeed{8, 0});
  const VectorPool pool(source);
  const auto k = static_cast<std::size_t>(state.range(0));
  std::size_t t = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(inverse_condition_number(draw_condition_trial(pool, k, 32, RngSeed{9, 0}, t++)));
  }
}
BENCHMARK(BM_ConditionTrial)->Arg(2)->Arg(10);

}  // namespace

BENCHMARK_MAIN();

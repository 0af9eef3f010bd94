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
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mimoscope/geometry.hpp"
#include "mimoscope/ingest.hpp"
#include "mimoscope/linalg.hpp"
#include "mimoscope/rng.hpp"
#include "mimoscope/synth.hpp"
#include "mimoscope/tensor.hpp"

namespace mimoscope {

enum class CurveScale { kLinear, kDb };

/// A metric versus antenna count (or node count) with Monte Carlo statistics.
/// A NaN mean marks a point that could not be formed (reported as a sentinel).
struct MetricCurve {
  std::string metric_name;
  std::string x_name = "m";
  CurveScale scale = CurveScale::kLinear;
  std::vector<std::size_t> x;
  std::vector<double> mean;
  std::vector<double> std_error;
  std::vector<std::size_t> trials;
  bool degenerate = false;

  std::size_t size() const noexcept { return x.size(); }
  /// x strictly increasing, std_error >= 0, trials > 0, equal lengths.
  void validate() const;
};

class EmpiricalCdf {
 public:
  EmpiricalCdf() = default;
  explicit EmpiricalCdf(std::vector<double> samples);

  const std::vector<double>& values() const noexcept { return sorted_; }
  /// Fraction of samples <= q.
  double operator()(double q) const;

 private:
  std::vector<double> sorted_;
};

/// Where channels come from: a measured dataset, explicit tensors, or a
/// synthetic model. Immutable after construction.
class ChannelSource {
 public:
  struct Position {
    ChannelTensor tensor;
    std::optional<std::string> path_label;
    bool continuous = false;
  };

  /// Loads every (or every listed) position of the dataset up front.
  static ChannelSource from_dataset(const Dataset& dataset, const std::vector<std::string>& position_ids = {});
  static ChannelSource from_tensors(std::vector<Position> positions, ArrayGeometry geometry);
  /// Synthetic positions are realizations seed.derive({k}) of the model.
  static ChannelSource from_model(ChannelModel model, ArrayGeometry geometry, std::size_t positions, RngSeed seed);

  bool synthetic() const noexcept { return generator_ != nullptr; }
  const ChannelGenerator* generator() const noexcept { return generator_.get(); }
  const ArrayGeometry& geometry() const noexcept { return geometry_; }
  std::size_t antennas() const noexcept { return geometry_.size(); }
  std::size_t freqs() const;

  std::size_t position_count() const noexcept { return position_count_; }
  std::string position_id(std::size_t k) const;
  std::optional<std::string> path_label(std::size_t k) const;
  bool continuous(std::size_t k) const;
  ChannelTensor position(std::size_t k) const;

 private:
  ChannelSource() = default;

  ArrayGeometry geometry_;
  std::size_t position_count_ = 0;
  std::shared_ptr<const std::vector<Position>> positions_;
  std::shared_ptr<const ChannelGenerator> generator_;
  RngSeed seed_;
};

/// Draws channel vectors from distinct locations for the pairwise
/// experiments. Dataset positions flagged continuous are split into
/// non-overlapping virtual locations; synthetic sources draw fresh vectors.
class VectorPool {
 public:
  VectorPool(const ChannelSource& source, std::size_t virtual_location_length = 100);

  bool unlimited() const noexcept { return source_.synthetic(); }
  std::size_t location_count() const noexcept { return locations_.size(); }

  /// k distinct location indices, uniform without replacement.
  std::vector<std::size_t> draw_locations(std::size_t k, CounterRng& rng) const;

  /// M x k matrix: column j is the first m canonical antennas of a uniformly
  /// chosen (n, f) at the j-th drawn location.
  CMatrix draw(std::size_t k, std::size_t m, CounterRng& rng) const;

 private:
  ChannelSource source_;
  std::vector<std::size_t> elements_;
  std::vector<ChannelTensor> locations_;  // normalized
};

struct HardeningOptions {
  std::size_t window_length = 600;
  std::vector<std::size_t> antenna_counts;
  /// Monte Carlo realizations for synthetic sources; datasets use every window.
  std::size_t trials = 1;
  unsigned threads = 1;
};

struct HardeningResult {
  MetricCurve std_curve;  // mean gain std per m
  MetricCurve db_curve;   // 10 log10(sigma_1 / sigma_m) per m
  std::size_t windows = 0;
  std::size_t skipped_windows = 0;
};

HardeningResult run_hardening_curve(const ChannelSource& source, const HardeningOptions& options, RngSeed seed);

struct CorrelationOptions {
  std::vector<std::size_t> antenna_counts;
  std::size_t trials = 100000;
  std::size_t virtual_location_length = 100;
  unsigned threads = 1;
};

struct CorrelationResult {
  MetricCurve delta;     // E[delta]
  MetricCurve delta_sq;  // E[delta^2]
  MetricCurve delta_db;  // 20 log10 E[delta], display only
  std::size_t locations = 0;
};

CorrelationResult run_correlation_curve(const ChannelSource& source, const CorrelationOptions& options,
                                        RngSeed seed);

struct ConditionOptions {
  std::vector<std::size_t> node_counts;
  std::size_t antenna_count = 32;
  std::size_t trials = 10000;
  std::size_t virtual_location_length = 100;
  unsigned threads = 1;
};

struct ConditionResult {
  MetricCurve curve;  // x = K
  std::map<std::size_t, EmpiricalCdf> cdfs;
  std::size_t locations = 0;
};

ConditionResult run_condition_curve(const ChannelSource& source, const ConditionOptions& options, RngSeed seed);

/// The channel matrix used by one condition-number trial.
CMatrix draw_condition_trial(const VectorPool& pool, std::size_t k, std::size_t m, RngSeed seed, std::size_t trial);

/// Random stream used by one correlation trial.
RngSeed correlation_trial_seed(RngSeed seed, std::size_t m, std::size_t trial);

struct EigenOptions {
  std::size_t window_length = 600;
  std::size_t p = 3;
  std::size_t frequency = 0;
  /// Antenna counts for the chordal curve; each must satisfy p <= m <= M.
  std::vector<std::size_t> antenna_counts;
  /// Position indices whose windows are compared pairwise.
  std::vector<std::size_t> group_a;
  std::vector<std::size_t> group_b;
  unsigned threads = 1;
};

struct EigenRow {
  std::string position_id;
  std::size_t window = 0;
  std::vector<std::optional<double>> values_db;
  std::optional<double> energy_fraction;
};

struct EigenResult {
  std::vector<EigenRow> rows;
  MetricCurve chordal;
  std::size_t skipped = 0;
};

EigenResult run_eigen_analysis(const ChannelSource& source, const EigenOptions& options);

/// CSV with header "<x_name>,mean,stderr,trials"; NaN written as NA.
std::string curve_to_csv(const MetricCurve& curve);
std::string cdf_to_csv(const EmpiricalCdf& cdf);
/// position,window,index,value_db (one row per eigenvalue, NA below the dB floor).
std::string eigen_table_to_csv(const EigenResult& result);
/// position,window,energy_fraction.
std::string eigen_energy_to_csv(const EigenResult& result);
/// Shortest decimal that round-trips; NA for non-finite values.
std::string format_number(double value);

}  // namespace mimoscope

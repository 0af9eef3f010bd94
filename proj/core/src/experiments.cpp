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

#include "mimoscope/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "mimoscope/error.hpp"
#include "mimoscope/metrics.hpp"
#include "mimoscope/stats.hpp"

namespace mimoscope {

namespace {

// Stream tags keep the experiments' random streams disjoint.
constexpr std::uint64_t kHardeningTag = 0x48415244;    // "HARD"
constexpr std::uint64_t kCorrelationTag = 0x434f5252;  // "CORR"
constexpr std::uint64_t kConditionTag = 0x434f4e44;    // "COND"

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kDbPerNeper = 10.0 / 2.302585092994046;  // 10 / ln 10

std::vector<std::size_t> sorted_counts(std::vector<std::size_t> counts, std::size_t upper, const char* what) {
  std::sort(counts.begin(), counts.end());
  counts.erase(std::unique(counts.begin(), counts.end()), counts.end());
  if (counts.empty()) throw Error(ErrorKind::kConfiguration, std::string(what) + " list is empty");
  if (counts.front() == 0 || counts.back() > upper) {
    throw Error(ErrorKind::kConfiguration,
                std::string(what) + " must lie in [1, " + std::to_string(upper) + "]");
  }
  return counts;
}

void summarize(MetricCurve& curve, std::size_t x, std::span<const double> samples) {
  curve.x.push_back(x);
  curve.mean.push_back(mean_of(samples));
  curve.std_error.push_back(standard_error(samples));
  curve.trials.push_back(samples.size());
}

}  // namespace

void MetricCurve::validate() const {
  const std::size_t n = x.size();
  if (mean.size() != n || std_error.size() != n || trials.size() != n) {
    throw Error(ErrorKind::kInvalidInput, "curve columns have different lengths");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0 && x[i] <= x[i - 1]) throw Error(ErrorKind::kInvalidInput, "curve x is not strictly increasing");
    if (trials[i] == 0) throw Error(ErrorKind::kInvalidInput, "curve point without trials");
    if (!(std_error[i] >= 0.0) && !std::isnan(mean[i])) {
      throw Error(ErrorKind::kInvalidInput, "negative standard error");
    }
  }
}

EmpiricalCdf::EmpiricalCdf(std::vector<double> samples) : sorted_(std::move(samples)) {
  std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalCdf::operator()(double q) const {
  if (sorted_.empty()) return 0.0;
  const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), q);
  return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

// ---------------------------------------------------------------------------
// ChannelSource

ChannelSource ChannelSource::from_dataset(const Dataset& dataset, const std::vector<std::string>& position_ids) {
  std::vector<Position> positions;
  const auto& manifest = dataset.manifest();
  for (const auto& entry : manifest.positions) {
    if (!position_ids.empty() &&
        std::find(position_ids.begin(), position_ids.end(), entry.id) == position_ids.end()) {
      continue;
    }
    positions.push_back({dataset.load(entry.id), entry.path_label, entry.continuous});
  }
  for (const auto& id : position_ids) (void)manifest.position(id);
  return from_tensors(std::move(positions), manifest.array);
}

ChannelSource ChannelSource::from_tensors(std::vector<Position> positions, ArrayGeometry geometry) {
  for (const auto& p : positions) {
    if (p.tensor.antennas() != geometry.size()) {
      throw Error(ErrorKind::kInvalidInput, "tensor antenna count does not match the array", p.tensor.position_id());
    }
    if (p.tensor.freqs() != positions.front().tensor.freqs()) {
      throw Error(ErrorKind::kInvalidInput, "positions disagree on the number of frequencies",
                  p.tensor.position_id());
    }
  }
  ChannelSource s;
  s.geometry_ = std::move(geometry);
  s.position_count_ = positions.size();
  s.positions_ = std::make_shared<const std::vector<Position>>(std::move(positions));
  return s;
}

ChannelSource ChannelSource::from_model(ChannelModel model, ArrayGeometry geometry, std::size_t positions,
                                        RngSeed seed) {
  if (model.antennas != geometry.size()) {
    throw Error(ErrorKind::kConfiguration, "model antenna count does not match the array geometry");
  }
  ChannelSource s;
  s.generator_ = std::make_shared<const ChannelGenerator>(std::move(model));
  s.geometry_ = std::move(geometry);
  s.position_count_ = positions;
  s.seed_ = seed;
  return s;
}

std::size_t ChannelSource::freqs() const {
  if (generator_) return generator_->model().freqs;
  return positions_->empty() ? 0 : positions_->front().tensor.freqs();
}

std::string ChannelSource::position_id(std::size_t k) const {
  if (k >= position_count_) throw Error(ErrorKind::kOutOfRange, "position index out of range");
  if (generator_) return "pos" + std::to_string(k);
  return (*positions_)[k].tensor.position_id();
}

std::optional<std::string> ChannelSource::path_label(std::size_t k) const {
  if (k >= position_count_) throw Error(ErrorKind::kOutOfRange, "position index out of range");
  if (generator_) return std::nullopt;
  return (*positions_)[k].path_label;
}

bool ChannelSource::continuous(std::size_t k) const {
  if (k >= position_count_) throw Error(ErrorKind::kOutOfRange, "position index out of range");
  return generator_ ? false : (*positions_)[k].continuous;
}

ChannelTensor ChannelSource::position(std::size_t k) const {
  if (k >= position_count_) throw Error(ErrorKind::kOutOfRange, "position index out of range");
  if (generator_) return generator_->generate(seed_.derive({k}), position_id(k));
  return (*positions_)[k].tensor;
}

// ---------------------------------------------------------------------------
// VectorPool

VectorPool::VectorPool(const ChannelSource& source, std::size_t virtual_location_length) : source_(source) {
  if (virtual_location_length == 0) throw Error(ErrorKind::kConfiguration, "virtual location length must be >= 1");
  if (source_.synthetic()) return;
  for (std::size_t k = 0; k < source_.position_count(); ++k) {
    const ChannelTensor tensor = source_.position(k);
    if (source_.continuous(k)) {
      for (const auto& w : segment_windows(tensor, virtual_location_length)) {
        locations_.push_back(normalize(slice_window(tensor, w)).tensor());
      }
    } else {
      locations_.push_back(normalize(tensor).tensor());
    }
  }
}

std::vector<std::size_t> VectorPool::draw_locations(std::size_t k, CounterRng& rng) const {
  if (unlimited()) {
    std::vector<std::size_t> idx(k);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    return idx;
  }
  if (k > locations_.size()) {
    throw Error(ErrorKind::kInsufficientData, "need " + std::to_string(k) + " distinct locations, have " +
                                                  std::to_string(locations_.size()));
  }
  std::vector<std::size_t> idx(locations_.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + rng.uniform_index(idx.size() - i);
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  return idx;
}

CMatrix VectorPool::draw(std::size_t k, std::size_t m, CounterRng& rng) const {
  const auto elements = source_.geometry().element_indices(0, m);
  CMatrix out(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(k));
  if (unlimited()) {
    for (std::size_t j = 0; j < k; ++j) {
      const auto v = source_.generator()->draw_vector(rng);
      for (std::size_t i = 0; i < m; ++i) out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v[elements[i]];
    }
    return out;
  }
  const auto locs = draw_locations(k, rng);
  for (std::size_t j = 0; j < k; ++j) {
    const ChannelTensor& t = locations_[locs[j]];
    const std::size_t n = rng.uniform_index(t.snapshots());
    const std::size_t f = rng.uniform_index(t.freqs());
    const auto v = t.antenna_vector(n, f);
    for (std::size_t i = 0; i < m; ++i) out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v[elements[i]];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Channel hardening

HardeningResult run_hardening_curve(const ChannelSource& source, const HardeningOptions& options, RngSeed seed) {
  if (options.window_length == 0) throw Error(ErrorKind::kConfiguration, "window length must be >= 1");
  const auto counts = sorted_counts(options.antenna_counts, source.antennas(), "antenna counts");
  std::vector<std::size_t> evaluated = counts;
  if (evaluated.front() != 1) evaluated.insert(evaluated.begin(), 1);
  const std::size_t columns = evaluated.size();

  const std::size_t items = source.synthetic() ? options.trials : source.position_count();
  if (source.synthetic() && items == 0) throw Error(ErrorKind::kConfiguration, "trials must be >= 1");

  struct ItemResult {
    std::vector<double> sigmas;  // windows x columns, row-major
    std::size_t windows = 0;
    std::size_t skipped = 0;
  };
  std::vector<ItemResult> results(items);

  parallel_for(items, options.threads, [&](std::size_t item) {
    const ChannelTensor tensor =
        source.synthetic() ? source.generator()->generate(seed.derive({kHardeningTag, item})) : source.position(item);
    ItemResult& out = results[item];
    std::vector<double> row(columns);
    for (const auto& window : segment_windows(tensor, options.window_length)) {
      try {
        const NormalizedTensor nt = normalize(slice_window(tensor, window));
        for (std::size_t c = 0; c < columns; ++c) row[c] = subset_gain_std(nt, source.geometry(), evaluated[c]);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::kDegenerateInput) throw;
        ++out.skipped;
        continue;
      }
      out.sigmas.insert(out.sigmas.end(), row.begin(), row.end());
      ++out.windows;
    }
  });

  HardeningResult result;
  for (const auto& r : results) {
    result.windows += r.windows;
    result.skipped_windows += r.skipped;
  }
  if (result.windows == 0) {
    throw Error(ErrorKind::kInsufficientData, "no complete window of " + std::to_string(options.window_length) +
                                                  " snapshots in the source");
  }

  std::vector<std::vector<double>> per_column(columns);
  for (auto& col : per_column) col.reserve(result.windows);
  for (const auto& r : results)
    for (std::size_t w = 0; w < r.windows; ++w)
      for (std::size_t c = 0; c < columns; ++c) per_column[c].push_back(r.sigmas[w * columns + c]);

  result.std_curve.metric_name = "std";
  result.db_curve.metric_name = "db";
  result.db_curve.scale = CurveScale::kDb;
  const double sigma_one = mean_of(per_column[0]);
  const double se_one = standard_error(per_column[0]);
  for (std::size_t c = 0; c < columns; ++c) {
    const std::size_t m = evaluated[c];
    if (!std::binary_search(counts.begin(), counts.end(), m)) continue;
    summarize(result.std_curve, m, per_column[c]);
    const double sigma_m = result.std_curve.mean.back();
    const double se_m = result.std_curve.std_error.back();
    result.db_curve.x.push_back(m);
    result.db_curve.trials.push_back(per_column[c].size());
    if (sigma_one > 0.0 && sigma_m > 0.0) {
      result.db_curve.mean.push_back(10.0 * std::log10(sigma_one / sigma_m));
      // Delta method on log(sigma_1) - log(sigma_m), treating the two as independent.
      result.db_curve.std_error.push_back(
          m == 1 ? 0.0 : kDbPerNeper * std::hypot(se_one / sigma_one, se_m / sigma_m));
    } else {
      result.db_curve.mean.push_back(kNaN);
      result.db_curve.std_error.push_back(kNaN);
      result.db_curve.degenerate = true;
      result.std_curve.degenerate = true;
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Correlation coefficient

RngSeed correlation_trial_seed(RngSeed seed, std::size_t m, std::size_t trial) {
  return seed.derive({kCorrelationTag, m, trial});
}

CorrelationResult run_correlation_curve(const ChannelSource& source, const CorrelationOptions& options,
                                        RngSeed seed) {
  const auto counts = sorted_counts(options.antenna_counts, source.antennas(), "antenna counts");
  if (options.trials == 0) throw Error(ErrorKind::kConfiguration, "trials must be >= 1");
  const VectorPool pool(source, options.virtual_location_length);
  if (!pool.unlimited() && pool.location_count() < 2) {
    throw Error(ErrorKind::kInsufficientData, "correlation needs at least two locations");
  }

  CorrelationResult result;
  result.locations = pool.location_count();
  result.delta.metric_name = "delta";
  result.delta_sq.metric_name = "delta_sq";
  result.delta_db.metric_name = "delta_db";
  result.delta_db.scale = CurveScale::kDb;

  std::vector<double> delta(options.trials);
  std::vector<double> delta_sq(options.trials);
  for (std::size_t m : counts) {
    parallel_for(options.trials, options.threads, [&](std::size_t t) {
      CounterRng rng(correlation_trial_seed(seed, m, t));
      const CMatrix pair = pool.draw(2, m, rng);
      const double d = correlation_coefficient({pair.col(0).data(), static_cast<std::size_t>(m)},
                                               {pair.col(1).data(), static_cast<std::size_t>(m)});
      delta[t] = d;
      delta_sq[t] = d * d;
    });
    summarize(result.delta, m, delta);
    summarize(result.delta_sq, m, delta_sq);
    const double mean = result.delta.mean.back();
    const double se = result.delta.std_error.back();
    result.delta_db.x.push_back(m);
    result.delta_db.trials.push_back(options.trials);
    if (mean >= kDbFloor) {
      result.delta_db.mean.push_back(20.0 * std::log10(mean));
      result.delta_db.std_error.push_back(2.0 * kDbPerNeper * se / mean);
    } else {
      result.delta_db.mean.push_back(kNaN);
      result.delta_db.std_error.push_back(kNaN);
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Inverse condition number

CMatrix draw_condition_trial(const VectorPool& pool, std::size_t k, std::size_t m, RngSeed seed, std::size_t trial) {
  CounterRng rng(seed.derive({kConditionTag, k, trial}));
  return pool.draw(k, m, rng);
}

ConditionResult run_condition_curve(const ChannelSource& source, const ConditionOptions& options, RngSeed seed) {
  if (options.antenna_count == 0 || options.antenna_count > source.antennas()) {
    throw Error(ErrorKind::kConfiguration, "antenna count must lie in [1, " + std::to_string(source.antennas()) + "]");
  }
  if (options.trials == 0) throw Error(ErrorKind::kConfiguration, "trials must be >= 1");
  auto counts = options.node_counts;
  std::sort(counts.begin(), counts.end());
  counts.erase(std::unique(counts.begin(), counts.end()), counts.end());
  if (counts.empty() || counts.front() < 2) throw Error(ErrorKind::kConfiguration, "node counts must be >= 2");

  const VectorPool pool(source, options.virtual_location_length);
  if (!pool.unlimited() && counts.back() > pool.location_count()) {
    throw Error(ErrorKind::kInsufficientData, "K = " + std::to_string(counts.back()) + " exceeds the " +
                                                  std::to_string(pool.location_count()) + " available locations");
  }

  ConditionResult result;
  result.locations = pool.location_count();
  result.curve.metric_name = "inv";
  result.curve.x_name = "K";
  std::vector<double> values(options.trials);
  for (std::size_t k : counts) {
    parallel_for(options.trials, options.threads, [&](std::size_t t) {
      values[t] = inverse_condition_number(draw_condition_trial(pool, k, options.antenna_count, seed, t));
    });
    summarize(result.curve, k, values);
    result.cdfs.emplace(k, EmpiricalCdf(values));
  }
  return result;
}

// ---------------------------------------------------------------------------
// Eigenstructure and chordal distance

EigenResult run_eigen_analysis(const ChannelSource& source, const EigenOptions& options) {
  if (options.p == 0 || options.p > source.antennas()) {
    throw Error(ErrorKind::kConfiguration, "p must lie in [1, " + std::to_string(source.antennas()) + "]");
  }
  if (options.window_length < options.p) throw Error(ErrorKind::kConfiguration, "window length must be >= p");
  if (options.frequency >= source.freqs()) throw Error(ErrorKind::kConfiguration, "frequency index out of range");
  std::vector<std::size_t> counts;
  if (!options.antenna_counts.empty()) {
    counts = sorted_counts(options.antenna_counts, source.antennas(), "antenna counts");
    if (counts.front() < options.p) throw Error(ErrorKind::kConfiguration, "chordal antenna counts must be >= p");
  }
  for (std::size_t k : options.group_a)
    if (k >= source.position_count()) throw Error(ErrorKind::kConfiguration, "group position out of range");
  for (std::size_t k : options.group_b)
    if (k >= source.position_count()) throw Error(ErrorKind::kConfiguration, "group position out of range");

  struct PositionResult {
    std::vector<EigenRow> rows;
    std::size_t skipped = 0;
    // [count index][window] -> eigenspace, empty matrix when rank-deficient
    std::vector<std::vector<CMatrix>> spaces;
  };
  const std::size_t positions = source.position_count();
  std::vector<PositionResult> per_position(positions);
  auto in_groups = [&](std::size_t k) {
    return std::find(options.group_a.begin(), options.group_a.end(), k) != options.group_a.end() ||
           std::find(options.group_b.begin(), options.group_b.end(), k) != options.group_b.end();
  };

  parallel_for(positions, options.threads, [&](std::size_t k) {
    const ChannelTensor tensor = source.position(k);
    const NormalizedTensor nt = normalize(tensor);
    PositionResult& out = per_position[k];
    const auto windows = segment_windows(tensor, options.window_length);
    for (std::size_t w = 0; w < windows.size(); ++w) {
      const EigenSpectrum spectrum = eigh(correlation_matrix(nt, windows[w], options.frequency));
      const RVector values = clamped_values(spectrum);
      EigenRow row;
      row.position_id = tensor.position_id();
      row.window = w;
      for (Eigen::Index i = 0; i < values.size(); ++i) row.values_db.push_back(power_to_db(values(i)));
      if (numerical_rank(spectrum) >= static_cast<Eigen::Index>(options.p)) {
        row.energy_fraction = eigen_energy_fraction(spectrum, options.p);
      } else {
        ++out.skipped;
      }
      out.rows.push_back(std::move(row));
    }
    if (!in_groups(k)) return;
    out.spaces.resize(counts.size());
    for (std::size_t c = 0; c < counts.size(); ++c) {
      const NormalizedTensor subset = normalize(select_antennas(tensor, source.geometry(), counts[c]));
      for (const auto& window : windows) {
        try {
          out.spaces[c].push_back(
              dominant_eigenspace(eigh(correlation_matrix(subset, window, options.frequency)), options.p));
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::kInsufficientRank) throw;
          out.spaces[c].emplace_back();
          ++out.skipped;
        }
      }
    }
  });

  EigenResult result;
  for (auto& r : per_position) {
    result.skipped += r.skipped;
    for (auto& row : r.rows) result.rows.push_back(std::move(row));
  }
  result.chordal.metric_name = "chordal";
  for (std::size_t c = 0; c < counts.size(); ++c) {
    std::vector<double> distances;
    for (std::size_t a : options.group_a) {
      for (const CMatrix& ua : per_position[a].spaces[c]) {
        if (ua.size() == 0) continue;
        for (std::size_t b : options.group_b) {
          for (const CMatrix& ub : per_position[b].spaces[c]) {
            if (ub.size() == 0) continue;
            distances.push_back(chordal_distance(ua, ub));
          }
        }
      }
    }
    if (!distances.empty()) summarize(result.chordal, counts[c], distances);
  }
  return result;
}

// ---------------------------------------------------------------------------
// Output

std::string format_number(double value) {
  if (!std::isfinite(value)) return "NA";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::string curve_to_csv(const MetricCurve& curve) {
  std::ostringstream out;
  out << curve.x_name << ",mean,stderr,trials\n";
  for (std::size_t i = 0; i < curve.size(); ++i) {
    out << curve.x[i] << ',' << format_number(curve.mean[i]) << ',' << format_number(curve.std_error[i]) << ','
        << curve.trials[i] << '\n';
  }
  return out.str();
}

std::string cdf_to_csv(const EmpiricalCdf& cdf) {
  std::ostringstream out;
  out << "value,cdf\n";
  const auto& v = cdf.values();
  for (std::size_t i = 0; i < v.size(); ++i) {
    out << format_number(v[i]) << ',' << format_number(static_cast<double>(i + 1) / static_cast<double>(v.size()))
        << '\n';
  }
  return out.str();
}

std::string eigen_table_to_csv(const EigenResult& result) {
  std::ostringstream out;
  out << "position,window,index,value_db\n";
  for (const auto& row : result.rows) {
    for (std::size_t i = 0; i < row.values_db.size(); ++i) {
      out << row.position_id << ',' << row.window << ',' << i << ','
          << (row.values_db[i] ? format_number(*row.values_db[i]) : "NA") << '\n';
    }
  }
  return out.str();
}

std::string eigen_energy_to_csv(const EigenResult& result) {
  std::ostringstream out;
  out << "position,window,energy_fraction\n";
  for (const auto& row : result.rows) {
    out << row.position_id << ',' << row.window << ','
        << (row.energy_fraction ? format_number(*row.energy_fraction) : "NA") << '\n';
  }
  return out.str();
}

}  // namespace mimoscope

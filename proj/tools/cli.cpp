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

#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>
#include <limits>
#include <optional>
#include <set>
#include <sstream>

#include "mimoscope/error.hpp"
#include "mimoscope/experiments.hpp"
#include "mimoscope/ingest.hpp"
#include "mimoscope/metrics.hpp"
#include "mimoscope/scheduler.hpp"
#include "mimoscope/synth.hpp"

namespace mimoscope::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::set<std::string> kExperiments = {"hardening", "correlation", "condition", "eigen", "gain", "schedule"};

struct ModelParams {
  std::string kind = "iid";
  std::size_t antennas = 32;
  std::size_t snapshots = 6000;
  std::size_t freqs = 2;
  std::size_t positions = 10;
  double rho = 0.0;
  std::vector<double> angles_rad;
  std::vector<double> powers;
  double noise_floor = 0.01;
  std::string array = "ula";
  std::size_t rows = 1;
  bool continuous = false;
};

struct HardeningParams {
  std::size_t window_length = 600;
  std::vector<std::size_t> antenna_counts;  // empty: 1..M
  std::size_t trials = 100;
};

struct CorrelationParams {
  std::vector<std::size_t> antenna_counts;
  std::size_t trials = 100000;
  std::size_t virtual_location_length = 100;
};

struct ConditionParams {
  std::vector<std::size_t> node_counts = {2, 5, 10};
  std::size_t antenna_count = 0;  // 0: all antennas
  std::size_t trials = 10000;
  std::size_t virtual_location_length = 100;
};

struct EigenParams {
  std::size_t window_length = 600;
  std::size_t p = 3;
  std::size_t frequency = 0;
  std::vector<std::size_t> antenna_counts;  // empty: p..M
  std::vector<std::string> group_a;         // path labels or position ids
  std::vector<std::string> group_b;
};

struct ScheduleParams {
  std::size_t window_length = 600;
  std::size_t p = 3;
  std::size_t group_size = 2;
  std::string distance = "chordal";
};

struct RunConfig {
  std::optional<std::string> dataset;
  ModelParams model;
  std::uint64_t seed = 0;
  std::string out = ".";
  unsigned threads = 0;
  std::vector<std::string> experiments;
  HardeningParams hardening;
  CorrelationParams correlation;
  ConditionParams condition;
  EigenParams eigen;
  ScheduleParams schedule;
};

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfiguration:
    case ErrorKind::kInvalidInput:
    case ErrorKind::kOutOfRange:
      return kUsageError;
    case ErrorKind::kIo:
      return kIoError;
    default:
      return kDataFailure;
  }
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <class T>
void read_field(const json& j, const char* key, T& target) {
  if (!j.contains(key)) return;
  try {
    target = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kConfiguration, std::string("config field '") + key + "': " + e.what());
  }
}

void read_model(const json& j, ModelParams& m) {
  read_field(j, "kind", m.kind);
  read_field(j, "antennas", m.antennas);
  read_field(j, "snapshots", m.snapshots);
  read_field(j, "freqs", m.freqs);
  read_field(j, "positions", m.positions);
  read_field(j, "rho", m.rho);
  read_field(j, "angles_rad", m.angles_rad);
  read_field(j, "powers", m.powers);
  read_field(j, "noise_floor", m.noise_floor);
  read_field(j, "array", m.array);
  read_field(j, "rows", m.rows);
  read_field(j, "continuous", m.continuous);
}

void read_config_file(const std::string& path, RunConfig& config) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kConfiguration, "cannot open config file " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::kConfiguration, std::string("config file: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorKind::kConfiguration, "config must be a JSON object");
  read_field(j, "seed", config.seed);
  read_field(j, "out", config.out);
  read_field(j, "threads", config.threads);
  if (j.contains("source")) {
    const json& s = j.at("source");
    if (s.contains("dataset")) config.dataset = s.at("dataset").get<std::string>();
    if (s.contains("model")) read_model(s.at("model"), config.model);
  }
  if (j.contains("model")) read_model(j.at("model"), config.model);
  if (j.contains("experiments")) {
    const json& e = j.at("experiments");
    if (!e.is_object()) throw Error(ErrorKind::kConfiguration, "'experiments' must be an object of sections");
    for (const auto& [name, section] : e.items()) {
      config.experiments.push_back(name);
      if (name == "hardening") {
        read_field(section, "window_length", config.hardening.window_length);
        read_field(section, "antenna_counts", config.hardening.antenna_counts);
        read_field(section, "trials", config.hardening.trials);
      } else if (name == "correlation") {
        read_field(section, "antenna_counts", config.correlation.antenna_counts);
        read_field(section, "trials", config.correlation.trials);
        read_field(section, "virtual_location_length", config.correlation.virtual_location_length);
      } else if (name == "condition") {
        read_field(section, "node_counts", config.condition.node_counts);
        read_field(section, "antenna_count", config.condition.antenna_count);
        read_field(section, "trials", config.condition.trials);
        read_field(section, "virtual_location_length", config.condition.virtual_location_length);
      } else if (name == "eigen") {
        read_field(section, "window_length", config.eigen.window_length);
        read_field(section, "p", config.eigen.p);
        read_field(section, "frequency", config.eigen.frequency);
        read_field(section, "antenna_counts", config.eigen.antenna_counts);
        read_field(section, "group_a", config.eigen.group_a);
        read_field(section, "group_b", config.eigen.group_b);
      } else if (name == "schedule") {
        read_field(section, "window_length", config.schedule.window_length);
        read_field(section, "p", config.schedule.p);
        read_field(section, "group_size", config.schedule.group_size);
        read_field(section, "distance", config.schedule.distance);
      }
    }
  }
}

ChannelModel build_model(const ModelParams& spec) {
  ChannelModel model;
  model.antennas = spec.antennas;
  model.snapshots = spec.snapshots;
  model.freqs = spec.freqs;
  if (spec.kind == "iid") {
    model.kind = IidRayleigh{};
  } else if (spec.kind == "kronecker") {
    model.kind = KroneckerExponential{spec.rho};
  } else if (spec.kind == "sparse") {
    model.kind = SparseMultipath{spec.angles_rad, spec.powers, spec.noise_floor};
  } else {
    throw Error(ErrorKind::kConfiguration, "unknown model kind '" + spec.kind + "' (iid, kronecker, sparse)");
  }
  model.validate();
  return model;
}

ArrayGeometry build_geometry(const ModelParams& spec) {
  if (spec.antennas == 0) throw Error(ErrorKind::kConfiguration, "antenna count must be positive");
  if (spec.array == "ula") return canonical_numbering(ArrayKind::kUla, 1, spec.antennas);
  if (spec.array == "ura") {
    if (spec.rows == 0 || spec.antennas % spec.rows != 0) {
      throw Error(ErrorKind::kConfiguration, "URA rows must divide the antenna count");
    }
    return canonical_numbering(ArrayKind::kUra, spec.rows, spec.antennas / spec.rows);
  }
  throw Error(ErrorKind::kConfiguration, "unknown array '" + spec.array + "' (ula, ura)");
}

std::vector<std::size_t> range_counts(std::size_t from, std::size_t to) {
  std::vector<std::size_t> out;
  for (std::size_t m = from; m <= to; ++m) out.push_back(m);
  return out;
}

void check_counts(const std::vector<std::size_t>& counts, std::size_t lo, std::size_t hi, const char* what) {
  for (std::size_t c : counts) {
    if (c < lo || c > hi) {
      throw Error(ErrorKind::kConfiguration, std::string(what) + " value " + std::to_string(c) +
                                                 " outside [" + std::to_string(lo) + ", " + std::to_string(hi) +
                                                 "]");
    }
  }
}

/// Writes files into a scratch directory and moves them into place only
/// when every experiment has succeeded.
class StagedOutput {
 public:
  explicit StagedOutput(fs::path out) : out_(std::move(out)) {}
  ~StagedOutput() {
    std::error_code ec;
    if (!staging_.empty()) fs::remove_all(staging_, ec);
  }

  void write(const std::string& name, const std::string& content) {
    if (staging_.empty()) {
      std::error_code ec;
      fs::create_directories(out_, ec);
      if (ec) throw Error(ErrorKind::kIo, "cannot create " + out_.string() + ": " + ec.message());
      staging_ = out_ / ".mimoscope-staging";
      fs::remove_all(staging_, ec);
      fs::create_directories(staging_, ec);
      if (ec) throw Error(ErrorKind::kIo, "cannot create " + staging_.string() + ": " + ec.message());
    }
    std::ofstream f(staging_ / name, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorKind::kIo, "cannot write " + (staging_ / name).string());
    f << content;
    if (!f) throw Error(ErrorKind::kIo, "failed writing " + (staging_ / name).string());
    names_.push_back(name);
  }

  void commit() {
    for (const auto& name : names_) {
      std::error_code ec;
      fs::rename(staging_ / name, out_ / name, ec);
      if (ec) throw Error(ErrorKind::kIo, "cannot move " + name + " into " + out_.string() + ": " + ec.message());
    }
  }

 private:
  fs::path out_;
  fs::path staging_;
  std::vector<std::string> names_;
};

struct Flags {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> config;
  std::optional<unsigned> threads;

  std::optional<std::string> dataset;
  std::optional<std::string> model;
  std::optional<std::size_t> antennas, snapshots, freqs, positions, rows;
  std::optional<double> rho, noise_floor;
  std::optional<std::string> angles, powers, array;
  bool continuous = false;

  std::optional<std::string> experiments;
  std::optional<std::size_t> window, trials, p, group_size, antenna_count, virtual_length;
  std::optional<std::string> antenna_counts, node_counts, group_a, group_b, distance;
};

std::vector<std::size_t> parse_counts(const std::string& text) {
  std::vector<std::size_t> out;
  for (const auto& item : split_list(text)) {
    const auto dash = item.find('-');
    try {
      if (dash != std::string::npos && dash > 0) {
        const std::size_t lo = std::stoul(item.substr(0, dash));
        const std::size_t hi = std::stoul(item.substr(dash + 1));
        for (std::size_t v = lo; v <= hi; ++v) out.push_back(v);
      } else {
        out.push_back(std::stoul(item));
      }
    } catch (const std::exception&) {
      throw Error(ErrorKind::kConfiguration, "cannot parse count list '" + text + "'");
    }
  }
  return out;
}

std::vector<double> parse_reals(const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split_list(text)) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw Error(ErrorKind::kConfiguration, "cannot parse number list '" + text + "'");
    }
  }
  return out;
}

RunConfig resolve_config(const Flags& f) {
  RunConfig c;
  if (f.config) read_config_file(*f.config, c);
  if (f.seed) c.seed = *f.seed;
  if (f.out) c.out = *f.out;
  if (f.threads) c.threads = *f.threads;
  if (f.dataset) c.dataset = *f.dataset;
  if (f.model) c.model.kind = *f.model;
  if (f.antennas) c.model.antennas = *f.antennas;
  if (f.snapshots) c.model.snapshots = *f.snapshots;
  if (f.freqs) c.model.freqs = *f.freqs;
  if (f.positions) c.model.positions = *f.positions;
  if (f.rows) c.model.rows = *f.rows;
  if (f.rho) c.model.rho = *f.rho;
  if (f.noise_floor) c.model.noise_floor = *f.noise_floor;
  if (f.angles) c.model.angles_rad = parse_reals(*f.angles);
  if (f.powers) c.model.powers = parse_reals(*f.powers);
  if (f.array) c.model.array = *f.array;
  if (f.continuous) c.model.continuous = true;
  if (f.experiments) c.experiments = split_list(*f.experiments);

  if (f.window) c.hardening.window_length = c.eigen.window_length = c.schedule.window_length = *f.window;
  if (f.trials) c.hardening.trials = c.correlation.trials = c.condition.trials = *f.trials;
  if (f.p) c.eigen.p = c.schedule.p = *f.p;
  if (f.group_size) c.schedule.group_size = *f.group_size;
  if (f.antenna_count) c.condition.antenna_count = *f.antenna_count;
  if (f.virtual_length) {
    c.correlation.virtual_location_length = c.condition.virtual_location_length = *f.virtual_length;
  }
  if (f.antenna_counts) {
    const auto counts = parse_counts(*f.antenna_counts);
    c.hardening.antenna_counts = c.correlation.antenna_counts = c.eigen.antenna_counts = counts;
  }
  if (f.node_counts) c.condition.node_counts = parse_counts(*f.node_counts);
  if (f.group_a) c.eigen.group_a = split_list(*f.group_a);
  if (f.group_b) c.eigen.group_b = split_list(*f.group_b);
  if (f.distance) c.schedule.distance = *f.distance;
  return c;
}

/// Source shape known before any data is read, for parameter validation.
struct SourceShape {
  std::size_t antennas = 0;
  std::size_t freqs = 0;
};

SourceShape validate_config(RunConfig& c, const std::optional<DatasetManifest>& manifest, bool need_experiments) {
  SourceShape shape;
  if (manifest) {
    shape.antennas = manifest->num_antennas;
    shape.freqs = manifest->num_freqs;
  } else {
    (void)build_model(c.model);
    (void)build_geometry(c.model);
    if (c.model.positions == 0) throw Error(ErrorKind::kConfiguration, "positions must be >= 1");
    shape.antennas = c.model.antennas;
    shape.freqs = c.model.freqs;
  }
  if (c.threads > 1024) throw Error(ErrorKind::kConfiguration, "--threads must be <= 1024");
  if (!need_experiments) return shape;

  if (c.experiments.empty()) throw Error(ErrorKind::kConfiguration, "no experiments selected");
  for (const auto& e : c.experiments) {
    if (!kExperiments.contains(e)) throw Error(ErrorKind::kConfiguration, "unknown experiment '" + e + "'");
  }
  const std::size_t m = shape.antennas;
  auto& h = c.hardening;
  if (h.antenna_counts.empty()) h.antenna_counts = range_counts(1, m);
  if (h.window_length == 0) throw Error(ErrorKind::kConfiguration, "window length must be >= 1");
  if (h.trials == 0) throw Error(ErrorKind::kConfiguration, "trials must be >= 1");
  check_counts(h.antenna_counts, 1, m, "hardening antenna count");

  auto& r = c.correlation;
  if (r.antenna_counts.empty()) r.antenna_counts = range_counts(1, m);
  if (r.trials == 0 || r.virtual_location_length == 0) {
    throw Error(ErrorKind::kConfiguration, "correlation trials and virtual location length must be >= 1");
  }
  check_counts(r.antenna_counts, 1, m, "correlation antenna count");

  auto& k = c.condition;
  if (k.antenna_count == 0) k.antenna_count = m;
  if (k.antenna_count > m) throw Error(ErrorKind::kConfiguration, "condition antenna count exceeds the array");
  if (k.trials == 0 || k.virtual_location_length == 0) {
    throw Error(ErrorKind::kConfiguration, "condition trials and virtual location length must be >= 1");
  }
  check_counts(k.node_counts, 2, std::numeric_limits<std::size_t>::max(), "node count");
  if (k.node_counts.empty()) throw Error(ErrorKind::kConfiguration, "node count list is empty");

  auto& e = c.eigen;
  if (e.p == 0 || e.p > m) throw Error(ErrorKind::kConfiguration, "p must lie in [1, M]");
  if (e.window_length < e.p) throw Error(ErrorKind::kConfiguration, "eigen window length must be >= p");
  if (e.frequency >= shape.freqs) throw Error(ErrorKind::kConfiguration, "eigen frequency index out of range");
  if (e.antenna_counts.empty()) e.antenna_counts = range_counts(e.p, m);
  check_counts(e.antenna_counts, e.p, m, "eigen antenna count");

  auto& s = c.schedule;
  if (s.group_size < 2) throw Error(ErrorKind::kConfiguration, "group size must be >= 2");
  if (s.p == 0 || s.p > m) throw Error(ErrorKind::kConfiguration, "schedule p must lie in [1, M]");
  if (s.window_length == 0) throw Error(ErrorKind::kConfiguration, "window length must be >= 1");
  if (s.distance != "chordal" && s.distance != "correlation") {
    throw Error(ErrorKind::kConfiguration, "distance must be 'chordal' or 'correlation'");
  }
  return shape;
}

ChannelSource make_source(const RunConfig& c, const std::optional<Dataset>& dataset) {
  if (dataset) return ChannelSource::from_dataset(*dataset);
  return ChannelSource::from_model(build_model(c.model), build_geometry(c.model), c.model.positions,
                                   RngSeed{c.seed, 0});
}

/// Pairwise experiments on datasets need enough distinct locations.
void check_locations(const ChannelSource& source, const RunConfig& c) {
  if (source.synthetic()) return;
  const auto wants = [&](const char* name) {
    return std::find(c.experiments.begin(), c.experiments.end(), name) != c.experiments.end();
  };
  if (wants("correlation")) {
    const VectorPool pool(source, c.correlation.virtual_location_length);
    if (pool.location_count() < 2) {
      throw Error(ErrorKind::kConfiguration, "correlation needs at least 2 locations, dataset provides " +
                                                 std::to_string(pool.location_count()));
    }
  }
  if (wants("condition")) {
    const VectorPool pool(source, c.condition.virtual_location_length);
    const std::size_t k = *std::max_element(c.condition.node_counts.begin(), c.condition.node_counts.end());
    if (pool.location_count() < k) {
      throw Error(ErrorKind::kConfiguration, "node count K = " + std::to_string(k) + " exceeds the " +
                                                 std::to_string(pool.location_count()) + " available locations");
    }
  }
}

std::vector<std::size_t> resolve_group(const ChannelSource& source, const std::vector<std::string>& names,
                                       std::size_t fallback) {
  std::vector<std::size_t> out;
  if (names.empty()) {
    if (fallback < source.position_count()) out.push_back(fallback);
    return out;
  }
  for (std::size_t k = 0; k < source.position_count(); ++k) {
    const auto label = source.path_label(k);
    const std::string id = source.position_id(k);
    for (const auto& n : names) {
      if (n == id || (label && *label == n)) {
        out.push_back(k);
        break;
      }
    }
  }
  if (out.empty()) throw Error(ErrorKind::kConfiguration, "eigen group matches no position");
  return out;
}

std::string print_db(const MetricCurve& curve, std::size_t x) {
  for (std::size_t i = 0; i < curve.size(); ++i)
    if (curve.x[i] == x) return format_number(curve.mean[i]);
  return "NA";
}

void add_model_options(CLI::App& app, Flags& f) {
  app.add_option("--model", f.model, "Channel model: iid, kronecker, sparse");
  app.add_option("--antennas", f.antennas, "Number of antennas M");
  app.add_option("--snapshots", f.snapshots, "Snapshots N per position");
  app.add_option("--freqs", f.freqs, "Frequency points F");
  app.add_option("--positions", f.positions, "Number of synthetic positions");
  app.add_option("--rho", f.rho, "Kronecker correlation rho in [0, 1)");
  app.add_option("--angles", f.angles, "Sparse model steering angles in radians, comma separated");
  app.add_option("--powers", f.powers, "Sparse model path powers, comma separated");
  app.add_option("--noise-floor", f.noise_floor, "Sparse model noise power per antenna");
  app.add_option("--array", f.array, "Array kind: ula or ura");
  app.add_option("--rows", f.rows, "URA rows");
}

void add_experiment_options(CLI::App& app, Flags& f) {
  app.add_option("--dataset", f.dataset, "Dataset directory (otherwise a synthetic model is used)");
  app.add_option("--window", f.window, "Window length in snapshots");
  app.add_option("--trials", f.trials, "Monte Carlo trials");
  app.add_option("--p", f.p, "Eigenspace dimension");
  app.add_option("--antenna-counts", f.antenna_counts, "Antenna counts, e.g. 1,2,4 or 1-31");
  app.add_option("--virtual-length", f.virtual_length, "Snapshots per virtual location");
}

int cmd_synth(const Flags& flags, std::ostream& out) {
  RunConfig c = resolve_config(flags);
  validate_config(c, std::nullopt, false);
  const ChannelModel model = build_model(c.model);
  const ArrayGeometry geometry = build_geometry(c.model);

  DatasetManifest manifest;
  manifest.carrier_hz = 869.525e6;
  manifest.num_freqs = model.freqs;
  manifest.num_antennas = model.antennas;
  manifest.snapshot_interval_s = 0.01;
  manifest.array = geometry;
  const ChannelSource source = ChannelSource::from_model(model, geometry, c.model.positions, RngSeed{c.seed, 0});
  std::map<std::string, ChannelTensor> tensors;
  for (std::size_t k = 0; k < source.position_count(); ++k) {
    PositionEntry entry;
    entry.id = source.position_id(k);
    entry.label = model_name(model);
    entry.continuous = c.model.continuous;
    entry.num_snapshots = model.snapshots;
    entry.file = entry.id + ".cf64";
    manifest.positions.push_back(entry);
    tensors.emplace(entry.id, source.position(k));
  }
  write_dataset(manifest, tensors, c.out);
  out << "synth: wrote " << manifest.positions.size() << " positions (" << model_name(model) << ", M="
      << model.antennas << ", N=" << model.snapshots << ", F=" << model.freqs << ") to " << c.out << "\n";
  return kOk;
}

int cmd_validate(const std::string& path, std::ostream& out) {
  DatasetManifest manifest;
  try {
    manifest = read_manifest(path);
  } catch (const Error& e) {
    out << "FAIL manifest: " << e.what() << "\n";
    return kDataFailure;
  }
  out << "PASS manifest (" << manifest.positions.size() << " positions)\n";
  bool ok = true;
  for (const auto& entry : manifest.positions) {
    try {
      (void)read_position(path, manifest, entry);
      out << "PASS " << entry.id << "\n";
    } catch (const Error& e) {
      ok = false;
      out << "FAIL " << entry.id << ": " << e.what() << "\n";
    }
  }
  return ok ? kOk : kDataFailure;
}

int cmd_analyze(const Flags& flags, std::ostream& out, bool schedule_only) {
  RunConfig c = resolve_config(flags);
  if (schedule_only) c.experiments = {"schedule"};
  std::optional<Dataset> dataset;
  std::optional<DatasetManifest> manifest;
  if (c.dataset) {
    dataset = load_dataset(*c.dataset);
    manifest = dataset->manifest();
  }
  validate_config(c, manifest, true);
  const ChannelSource source = make_source(c, dataset);
  check_locations(source, c);
  const RngSeed seed{c.seed, 0};

  StagedOutput staged(c.out);
  json summary;
  summary["seed"] = c.seed;
  summary["source"] = c.dataset ? json{{"dataset", *c.dataset}} : json{{"model", c.model.kind}};
  summary["antennas"] = source.antennas();

  for (const auto& name : c.experiments) {
    if (name == "hardening") {
      HardeningOptions o{c.hardening.window_length, c.hardening.antenna_counts, c.hardening.trials, c.threads};
      const HardeningResult r = run_hardening_curve(source, o, seed);
      staged.write("hardening_std.csv", curve_to_csv(r.std_curve));
      staged.write("hardening_db.csv", curve_to_csv(r.db_curve));
      const std::size_t top = r.db_curve.x.back();
      summary["hardening"] = {{"windows", r.windows},
                              {"skipped_windows", r.skipped_windows},
                              {"degenerate", r.db_curve.degenerate}};
      out << "hardening: " << r.windows << " windows, hardening(" << top << ") = " << print_db(r.db_curve, top)
          << " dB" << (r.db_curve.degenerate ? " [degenerate]" : "") << "\n";
    } else if (name == "correlation") {
      CorrelationOptions o{c.correlation.antenna_counts, c.correlation.trials,
                           c.correlation.virtual_location_length, c.threads};
      const CorrelationResult r = run_correlation_curve(source, o, seed);
      staged.write("correlation_delta.csv", curve_to_csv(r.delta));
      staged.write("correlation_delta_sq.csv", curve_to_csv(r.delta_sq));
      staged.write("correlation_delta_db.csv", curve_to_csv(r.delta_db));
      summary["correlation"] = {{"locations", r.locations}, {"trials", c.correlation.trials}};
      const std::size_t last = r.delta_sq.size() - 1;
      out << "correlation: " << c.correlation.trials << " trials per M, E[delta^2](" << r.delta_sq.x[last]
          << ") = " << format_number(r.delta_sq.mean[last]) << "\n";
    } else if (name == "condition") {
      ConditionOptions o{c.condition.node_counts, c.condition.antenna_count, c.condition.trials,
                         c.condition.virtual_location_length, c.threads};
      const ConditionResult r = run_condition_curve(source, o, seed);
      staged.write("condition_inv.csv", curve_to_csv(r.curve));
      for (const auto& [k, cdf] : r.cdfs) staged.write("condition_cdf_K" + std::to_string(k) + ".csv", cdf_to_csv(cdf));
      summary["condition"] = {{"locations", r.locations}, {"antenna_count", c.condition.antenna_count}};
      out << "condition: M=" << c.condition.antenna_count << ", mean inverse condition number";
      for (std::size_t i = 0; i < r.curve.size(); ++i) {
        out << " K=" << r.curve.x[i] << ":" << format_number(r.curve.mean[i]);
      }
      out << "\n";
    } else if (name == "eigen") {
      EigenOptions o;
      o.window_length = c.eigen.window_length;
      o.p = c.eigen.p;
      o.frequency = c.eigen.frequency;
      o.antenna_counts = c.eigen.antenna_counts;
      o.group_a = resolve_group(source, c.eigen.group_a, 0);
      o.group_b = resolve_group(source, c.eigen.group_b, 1);
      o.threads = c.threads;
      const EigenResult r = run_eigen_analysis(source, o);
      staged.write("eigen_values.csv", eigen_table_to_csv(r));
      staged.write("eigen_energy.csv", eigen_energy_to_csv(r));
      staged.write("eigen_chordal.csv", curve_to_csv(r.chordal));
      summary["eigen"] = {{"windows", r.rows.size()}, {"skipped", r.skipped}};
      out << "eigen: " << r.rows.size() << " windows, " << r.skipped << " rank-deficient, chordal points "
          << r.chordal.size() << "\n";
    } else if (name == "gain") {
      std::ostringstream csv;
      csv << "position,antenna,gain_db\n";
      for (std::size_t k = 0; k < source.position_count(); ++k) {
        const ChannelTensor t = source.position(k);
        const auto gains = per_antenna_mean_gain_db(t);
        for (std::size_t m = 0; m < gains.size(); ++m) {
          csv << t.position_id() << ',' << m << ',' << (gains[m] ? format_number(*gains[m]) : "NA") << '\n';
        }
      }
      staged.write("gain_per_antenna.csv", csv.str());
      summary["gain"] = {{"positions", source.position_count()}};
      out << "gain: per-antenna mean gain for " << source.position_count() << " positions\n";
    } else if (name == "schedule") {
      const SignatureSet set = build_signatures(source, c.schedule.window_length, c.schedule.p);
      const SignatureDistance dist =
          c.schedule.distance == "correlation" ? SignatureDistance(correlation_separation) : chordal_separation;
      const auto groups = greedy_group(set.signatures, c.schedule.group_size, dist);
      staged.write("schedule_groups.json", groups_to_json(groups, c.schedule.p, set.skipped));
      summary["schedule"] = {{"signatures", set.signatures.size()}, {"groups", groups.size()},
                             {"skipped", set.skipped.size()}};
      out << "schedule: " << set.signatures.size() << " signatures in " << groups.size() << " groups, "
          << set.skipped.size() << " skipped\n";
    }
  }
  staged.write("summary.json", summary.dump(2) + "\n");
  staged.commit();
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Massive-MIMO channel characterization toolkit", "mimoscope"};
  app.require_subcommand(1);
  Flags flags;
  app.add_option("--seed", flags.seed, "Random seed (fully determines stochastic output)");
  app.add_option("--out", flags.out, "Output directory");
  app.add_option("--config", flags.config, "JSON run configuration");
  app.add_option("--threads", flags.threads, "Worker threads, 0 = auto (results do not depend on it)");

  auto* synth = app.add_subcommand("synth", "Write a synthetic dataset");
  synth->fallthrough();
  add_model_options(*synth, flags);
  synth->add_flag("--continuous", flags.continuous, "Mark positions as continuous recordings");

  auto* analyze = app.add_subcommand("analyze", "Run channel experiments and write CSV/JSON results");
  analyze->fallthrough();
  add_model_options(*analyze, flags);
  add_experiment_options(*analyze, flags);
  analyze->add_option("--experiments", flags.experiments,
                      "Comma-separated: hardening, correlation, condition, eigen, gain, schedule");
  analyze->add_option("--node-counts", flags.node_counts, "Node counts K for the condition experiment");
  analyze->add_option("--antenna-count", flags.antenna_count, "Antennas M for the condition experiment");
  analyze->add_option("--group-a", flags.group_a, "Eigen chordal group A (path labels or position ids)");
  analyze->add_option("--group-b", flags.group_b, "Eigen chordal group B");
  analyze->add_option("--group-size", flags.group_size, "Scheduling group size");
  analyze->add_option("--distance", flags.distance, "Scheduling distance: chordal or correlation");

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "Check a dataset's manifest, file sizes and samples");
  validate->fallthrough();
  validate->add_option("dataset", validate_path, "Dataset directory")->required();

  auto* schedule = app.add_subcommand("schedule", "Group nodes by eigenspace separation");
  schedule->fallthrough();
  add_model_options(*schedule, flags);
  add_experiment_options(*schedule, flags);
  schedule->add_option("--group-size", flags.group_size, "Scheduling group size");
  schedule->add_option("--distance", flags.distance, "chordal or correlation");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  }

  try {
    if (synth->parsed()) return cmd_synth(flags, out);
    if (validate->parsed()) return cmd_validate(validate_path, out);
    if (analyze->parsed()) return cmd_analyze(flags, out, false);
    if (schedule->parsed()) return cmd_analyze(flags, out, true);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kIoError;
  }
  return kUsageError;
}

}  // namespace mimoscope::cli

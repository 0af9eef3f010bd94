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

#include "mimoscope/ingest.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "mimoscope/error.hpp"

namespace mimoscope {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

template <class T>
T to_little_endian(T value) {
  if constexpr (std::endian::native == std::endian::little) {
    return value;
  } else {
    std::array<unsigned char, sizeof(T)> bytes;
    std::memcpy(bytes.data(), &value, sizeof(T));
    std::reverse(bytes.begin(), bytes.end());
    std::memcpy(&value, bytes.data(), sizeof(T));
    return value;
  }
}

template <class Float, class Bits>
Float decode(const unsigned char* p) {
  Bits bits;
  std::memcpy(&bits, p, sizeof(Bits));
  bits = to_little_endian(bits);
  return std::bit_cast<Float>(bits);
}

template <class Float, class Bits>
void encode(Float value, std::string& out) {
  const Bits bits = to_little_endian(std::bit_cast<Bits>(value));
  char buf[sizeof(Bits)];
  std::memcpy(buf, &bits, sizeof(Bits));
  out.append(buf, sizeof(Bits));
}

std::size_t expected_bytes(const DatasetManifest& manifest, const PositionEntry& entry) {
  return entry.num_snapshots * manifest.num_freqs * manifest.num_antennas *
         bytes_per_sample(sample_format_of(entry.file));
}

void write_file_atomically(const fs::path& target, const std::string& bytes) {
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::kIo, "cannot open " + tmp.string() + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorKind::kIo, "failed writing " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot rename " + tmp.string() + ": " + ec.message());
}

template <class T>
T required(const json& j, const char* key) {
  if (!j.contains(key)) throw Error(ErrorKind::kParse, std::string("manifest is missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kParse, std::string("field '") + key + "': " + e.what());
  }
}

}  // namespace

SampleFormat sample_format_of(std::string_view file_name) {
  const fs::path p(file_name);
  if (p.extension() == ".cf64") return SampleFormat::kComplex64;
  if (p.extension() == ".cf32") return SampleFormat::kComplex32;
  throw Error(ErrorKind::kValidation, "unsupported sample file extension in '" + std::string(file_name) + "'");
}

std::size_t bytes_per_sample(SampleFormat format) { return format == SampleFormat::kComplex64 ? 16 : 8; }

void DatasetManifest::validate() const {
  if (version.empty() || version.substr(0, version.find('.')) != "1") {
    throw Error(ErrorKind::kVersionMismatch, "unsupported format version '" + version + "'");
  }
  if (num_freqs == 0) throw Error(ErrorKind::kValidation, "num_freqs must be positive");
  if (num_antennas == 0) throw Error(ErrorKind::kValidation, "num_antennas must be positive");
  if (array.size() != num_antennas) {
    throw Error(ErrorKind::kValidation, "array has rows*cols = " + std::to_string(array.size()) +
                                            " elements but num_antennas = " + std::to_string(num_antennas));
  }
  if (!(carrier_hz >= 0.0) || !(snapshot_interval_s >= 0.0)) {
    throw Error(ErrorKind::kValidation, "carrier_hz and snapshot_interval_s must be nonnegative");
  }
  std::set<std::string> ids;
  for (const auto& p : positions) {
    if (p.id.empty()) throw Error(ErrorKind::kValidation, "position with empty id");
    if (!ids.insert(p.id).second) throw Error(ErrorKind::kValidation, "duplicate position id", p.id);
    if (p.num_snapshots == 0) throw Error(ErrorKind::kValidation, "num_snapshots must be positive", p.id);
    if (p.file.empty() || fs::path(p.file).is_absolute() || p.file.find("..") != std::string::npos) {
      throw Error(ErrorKind::kValidation, "file must be a relative path inside the dataset", p.id);
    }
    try {
      (void)sample_format_of(p.file);
    } catch (const Error& e) {
      throw Error(ErrorKind::kValidation, e.what(), p.id);
    }
  }
}

const PositionEntry& DatasetManifest::position(std::string_view id) const {
  for (const auto& p : positions)
    if (p.id == id) return p;
  throw Error(ErrorKind::kValidation, "unknown position id", std::string(id));
}

std::string manifest_to_json(const DatasetManifest& m) {
  json numbering = json::array();
  for (const auto& p : m.array.numbering()) numbering.push_back({p.row, p.col});
  json positions = json::array();
  for (const auto& p : m.positions) {
    json e = {{"id", p.id},
              {"label", p.label},
              {"los", p.los},
              {"continuous", p.continuous},
              {"num_snapshots", p.num_snapshots},
              {"file", p.file}};
    if (p.distance_m) e["distance_m"] = *p.distance_m;
    if (p.path_label) e["path_label"] = *p.path_label;
    positions.push_back(std::move(e));
  }
  json j = {{"version", m.version},
            {"carrier_hz", m.carrier_hz},
            {"num_freqs", m.num_freqs},
            {"num_antennas", m.num_antennas},
            {"snapshot_interval_s", m.snapshot_interval_s},
            {"array",
             {{"kind", std::string(to_string(m.array.kind()))},
              {"rows", m.array.rows()},
              {"cols", m.array.cols()},
              {"spacing_wavelengths", m.array.spacing_wavelengths()},
              {"numbering", numbering}}},
            {"positions", positions}};
  return j.dump(2) + "\n";
}

DatasetManifest manifest_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::kParse, e.what());
  }
  if (!j.is_object()) throw Error(ErrorKind::kParse, "manifest must be a JSON object");

  DatasetManifest m;
  m.version = required<std::string>(j, "version");
  if (m.version.substr(0, m.version.find('.')) != "1") {
    throw Error(ErrorKind::kVersionMismatch, "unsupported format version '" + m.version + "'");
  }
  m.carrier_hz = required<double>(j, "carrier_hz");
  m.num_freqs = required<std::size_t>(j, "num_freqs");
  m.num_antennas = required<std::size_t>(j, "num_antennas");
  m.snapshot_interval_s = required<double>(j, "snapshot_interval_s");

  const json array = required<json>(j, "array");
  const auto kind = parse_array_kind(required<std::string>(array, "kind"));
  const auto rows = required<std::size_t>(array, "rows");
  const auto cols = required<std::size_t>(array, "cols");
  const double spacing = array.value("spacing_wavelengths", 0.5);
  if (array.contains("numbering")) {
    std::vector<ElementPosition> numbering;
    for (const auto& entry : array.at("numbering")) {
      if (!entry.is_array() || entry.size() != 2) throw Error(ErrorKind::kParse, "numbering entries are [row, col]");
      numbering.push_back({entry[0].get<std::size_t>(), entry[1].get<std::size_t>()});
    }
    m.array = ArrayGeometry(kind, rows, cols, std::move(numbering), spacing);
  } else {
    const ArrayGeometry def = canonical_numbering(kind, rows, cols);
    m.array = ArrayGeometry(kind, rows, cols, def.numbering(), spacing);
  }

  for (const auto& e : required<json>(j, "positions")) {
    PositionEntry p;
    p.id = required<std::string>(e, "id");
    p.label = e.value("label", std::string{});
    p.los = e.value("los", false);
    p.continuous = e.value("continuous", false);
    if (e.contains("distance_m") && !e.at("distance_m").is_null()) p.distance_m = e.at("distance_m").get<double>();
    if (e.contains("path_label") && !e.at("path_label").is_null()) {
      p.path_label = e.at("path_label").get<std::string>();
    }
    p.num_snapshots = required<std::size_t>(e, "num_snapshots");
    p.file = required<std::string>(e, "file");
    m.positions.push_back(std::move(p));
  }
  m.validate();
  return m;
}

DatasetManifest read_manifest(const fs::path& root) {
  const fs::path path = root / kManifestFileName;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kMissingFile, "cannot open " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return manifest_from_json(text.str());
}

void check_position_file(const fs::path& root, const DatasetManifest& manifest, const PositionEntry& entry) {
  const fs::path path = root / entry.file;
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) throw Error(ErrorKind::kMissingFile, path.string() + " not found", entry.id);
  const auto actual = fs::file_size(path, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot stat " + path.string(), entry.id);
  const std::size_t expected = expected_bytes(manifest, entry);
  if (actual != expected) {
    throw Error(ErrorKind::kSizeMismatch,
                path.string() + " has " + std::to_string(actual) + " bytes, expected " + std::to_string(expected),
                entry.id);
  }
}

ChannelTensor read_position(const fs::path& root, const DatasetManifest& manifest, const PositionEntry& entry) {
  check_position_file(root, manifest, entry);
  const SampleFormat format = sample_format_of(entry.file);
  const std::size_t samples = entry.num_snapshots * manifest.num_freqs * manifest.num_antennas;
  std::vector<unsigned char> bytes(samples * bytes_per_sample(format));
  {
    std::ifstream in(root / entry.file, std::ios::binary);
    in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (in.gcount() != static_cast<std::streamsize>(bytes.size())) {
      throw Error(ErrorKind::kIo, "short read on " + entry.file, entry.id);
    }
  }
  std::vector<Complex> data(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    if (format == SampleFormat::kComplex64) {
      data[i] = {decode<double, std::uint64_t>(&bytes[16 * i]), decode<double, std::uint64_t>(&bytes[16 * i + 8])};
    } else {
      data[i] = {decode<float, std::uint32_t>(&bytes[8 * i]), decode<float, std::uint32_t>(&bytes[8 * i + 4])};
    }
  }
  return ChannelTensor(entry.id, entry.num_snapshots, manifest.num_freqs, manifest.num_antennas, std::move(data));
}

Dataset::Dataset(fs::path root, DatasetManifest manifest) : root_(std::move(root)), manifest_(std::move(manifest)) {}

ChannelTensor Dataset::load(std::string_view position_id) const {
  return read_position(root_, manifest_, manifest_.position(position_id));
}

ChannelTensor Dataset::load(std::size_t index) const {
  return read_position(root_, manifest_, manifest_.positions.at(index));
}

Dataset load_dataset(const fs::path& root) {
  DatasetManifest manifest = read_manifest(root);
  for (const auto& entry : manifest.positions) check_position_file(root, manifest, entry);
  return Dataset(root, std::move(manifest));
}

void write_dataset(const DatasetManifest& manifest, const std::map<std::string, ChannelTensor>& tensors,
                   const fs::path& root) {
  manifest.validate();
  if (tensors.size() != manifest.positions.size()) {
    throw Error(ErrorKind::kValidation, "manifest lists " + std::to_string(manifest.positions.size()) +
                                            " positions but " + std::to_string(tensors.size()) +
                                            " tensors were given");
  }
  for (const auto& entry : manifest.positions) {
    const auto it = tensors.find(entry.id);
    if (it == tensors.end()) throw Error(ErrorKind::kValidation, "no tensor for position", entry.id);
    const ChannelTensor& t = it->second;
    if (t.snapshots() != entry.num_snapshots || t.freqs() != manifest.num_freqs ||
        t.antennas() != manifest.num_antennas) {
      throw Error(ErrorKind::kValidation, "tensor shape does not match the manifest", entry.id);
    }
  }

  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot create " + root.string() + ": " + ec.message());

  for (const auto& entry : manifest.positions) {
    const ChannelTensor& t = tensors.at(entry.id);
    const SampleFormat format = sample_format_of(entry.file);
    std::string bytes;
    bytes.reserve(t.size() * bytes_per_sample(format));
    for (const Complex& h : t.data()) {
      if (format == SampleFormat::kComplex64) {
        encode<double, std::uint64_t>(h.real(), bytes);
        encode<double, std::uint64_t>(h.imag(), bytes);
      } else {
        encode<float, std::uint32_t>(static_cast<float>(h.real()), bytes);
        encode<float, std::uint32_t>(static_cast<float>(h.imag()), bytes);
      }
    }
    const fs::path target = root / entry.file;
    if (target.has_parent_path()) fs::create_directories(target.parent_path(), ec);
    write_file_atomically(target, bytes);
  }
  write_file_atomically(root / kManifestFileName, manifest_to_json(manifest));
}

}  // namespace mimoscope

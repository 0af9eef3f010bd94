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
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mimoscope/geometry.hpp"
#include "mimoscope/tensor.hpp"

namespace mimoscope {

inline constexpr std::string_view kManifestFileName = "manifest.json";
inline constexpr std::string_view kFormatVersion = "1.0";

/// Binary sample encodings: little-endian interleaved (re, im).
enum class SampleFormat { kComplex64, kComplex32 };

/// ".cf64" or ".cf32" from a file name; throws kValidation otherwise.
SampleFormat sample_format_of(std::string_view file_name);
std::size_t bytes_per_sample(SampleFormat format);

struct PositionEntry {
  std::string id;
  std::string label;
  bool los = false;
  std::optional<double> distance_m;
  std::optional<std::string> path_label;
  /// Continuous (moving) recordings are split into virtual locations for the
  /// pairwise experiments; static ones are used whole.
  bool continuous = false;
  std::size_t num_snapshots = 0;
  std::string file;
};

struct DatasetManifest {
  std::string version{kFormatVersion};
  double carrier_hz = 0.0;
  std::size_t num_freqs = 0;
  std::size_t num_antennas = 0;
  double snapshot_interval_s = 0.0;
  ArrayGeometry array;
  std::vector<PositionEntry> positions;

  /// Field-level checks (no file access). Throws kValidation or
  /// kVersionMismatch.
  void validate() const;
  const PositionEntry& position(std::string_view id) const;
};

std::string manifest_to_json(const DatasetManifest& manifest);
/// Parses and validates. Throws kParse on malformed JSON or missing fields.
DatasetManifest manifest_from_json(std::string_view text);

/// Reads <root>/manifest.json. Throws kMissingFile if absent.
DatasetManifest read_manifest(const std::filesystem::path& root);

/// Existence and byte-length check for one position file.
void check_position_file(const std::filesystem::path& root, const DatasetManifest& manifest,
                         const PositionEntry& entry);

/// Decodes one position file into a tensor (32-bit files are widened).
ChannelTensor read_position(const std::filesystem::path& root, const DatasetManifest& manifest,
                            const PositionEntry& entry);

/// A validated dataset on disk. Tensors are decoded on each load() call;
/// nothing is cached, so concurrent loads are safe.
class Dataset {
 public:
  Dataset(std::filesystem::path root, DatasetManifest manifest);

  const DatasetManifest& manifest() const noexcept { return manifest_; }
  const std::filesystem::path& root() const noexcept { return root_; }
  std::size_t size() const noexcept { return manifest_.positions.size(); }

  ChannelTensor load(std::string_view position_id) const;
  ChannelTensor load(std::size_t index) const;

 private:
  std::filesystem::path root_;
  DatasetManifest manifest_;
};

/// Parses the manifest and checks every position file's existence and size.
Dataset load_dataset(const std::filesystem::path& root);

/// Writes one binary file per position plus the manifest. Files are written
/// under temporary names and renamed once complete; the manifest goes last.
void write_dataset(const DatasetManifest& manifest, const std::map<std::string, ChannelTensor>& tensors,
                   const std::filesystem::path& root);

}  // namespace mimoscope

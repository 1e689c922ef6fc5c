// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "rfaug/image.hpp"
#include "rfaug/mask_ops.hpp"

namespace rfaug {

struct SampleRecord {
  std::string sample_id;
  std::string image_path;  ///< relative to the dataset root
  std::string mask_path;   ///< relative to the dataset root
  std::string label;       ///< empty only for background-only distractors
  std::string viewpoint;
  std::map<std::string, std::string> attributes;

  friend bool operator==(const SampleRecord&, const SampleRecord&) = default;
};

/// First line of meta.jsonl: {"header": {"viewpoints": [...], "attributes": [...]}}
struct DatasetHeader {
  std::vector<std::string> viewpoints;
  std::vector<std::string> attributes;

  bool has_viewpoint(const std::string& v) const;
  bool has_attribute(const std::string& a) const;

  friend bool operator==(const DatasetHeader&, const DatasetHeader&) = default;
};

/// Derived per-record cache filled at load time.
struct RecordStats {
  Size size;
  std::int64_t area = 0;
  std::optional<BoundingBox> bbox;  ///< absent for empty masks

  friend bool operator==(const RecordStats&, const RecordStats&) = default;
};

struct LoadOptions {
  std::uint8_t mask_threshold = 127;
  /// Accept records without an identity label; they can only ever be used
  /// as background donors.
  bool allow_unlabeled_backgrounds = false;
};

struct ValidationIssue {
  std::size_t line = 0;  ///< 1-based line in meta.jsonl
  std::string sample_id;
  std::string kind;  ///< missing_file, dimension_mismatch, metadata_parse, unknown_viewpoint, empty_mask
  std::string message;
};

struct ValidationReport {
  std::size_t records = 0;
  std::vector<ValidationIssue> issues;

  bool clean() const noexcept { return issues.empty(); }
};

/// Immutable, in-memory view of a dataset. Pixel data stays on disk and is
/// decoded on demand, so the index can be shared freely between threads.
class DatasetIndex {
public:
  std::size_t size() const noexcept { return records_.size(); }
  const std::filesystem::path& root() const noexcept { return root_; }
  const DatasetHeader& header() const noexcept { return header_; }
  const LoadOptions& options() const noexcept { return options_; }

  const SampleRecord& record(std::size_t i) const { return records_.at(i); }
  const RecordStats& stats(std::size_t i) const { return stats_.at(i); }
  const std::vector<SampleRecord>& records() const noexcept { return records_; }

  std::optional<std::size_t> find(const std::string& sample_id) const;

  bool usable_as_roi(std::size_t i) const;
  bool usable_as_background(std::size_t i) const;

  RasterImage load_image(std::size_t i) const;
  BinaryMask load_mask(std::size_t i) const;

  friend bool operator==(const DatasetIndex& a, const DatasetIndex& b) {
    return a.header_ == b.header_ && a.records_ == b.records_ &&
           a.stats_ == b.stats_;
  }

private:
  friend DatasetIndex load_dataset(const std::filesystem::path&,
                                   const std::filesystem::path&,
                                   const LoadOptions&);

  std::filesystem::path root_;
  DatasetHeader header_;
  LoadOptions options_;
  std::vector<SampleRecord> records_;
  std::vector<RecordStats> stats_;
  std::unordered_map<std::string, std::size_t> by_id_;
};

/// Loads `metadata` (default <root>/meta.jsonl). Throws MissingFile,
/// DimensionMismatch or MetadataParse on the first offending row. Records
/// with empty masks load fine but are not usable as donors.
DatasetIndex load_dataset(const std::filesystem::path& root,
                          const std::filesystem::path& metadata = {},
                          const LoadOptions& options = {});

/// Same checks as load_dataset, but collects every problem (including
/// empty masks) instead of stopping. Only a missing or unreadable metadata
/// file throws.
ValidationReport validate_dataset(const std::filesystem::path& root,
                                  const std::filesystem::path& metadata = {},
                                  const LoadOptions& options = {});

void write_metadata(const DatasetIndex& idx, const std::filesystem::path& out);

}  // namespace rfaug

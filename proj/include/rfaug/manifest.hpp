// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdio>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rfaug/dataset.hpp"
#include "rfaug/image.hpp"
#include "rfaug/pairing.hpp"

namespace rfaug {

struct ManifestRecord {
  std::string synthetic_path;  ///< relative to the manifest's directory
  std::string roi_source;
  std::string bg_source;
  std::string label;
  RoiMode roi_mode = RoiMode::full_body;
  std::string viewpoint;
  std::string config_hash;
  Size native_size;

  friend bool operator==(const ManifestRecord&, const ManifestRecord&) = default;
};

std::string to_json_line(const ManifestRecord& r);
/// Throws ParseFailure.
ManifestRecord parse_manifest_line(std::string_view line);

/// One JSON object per line, in input order. Throws IoFailure.
std::size_t write_manifest(std::span<const ManifestRecord> records,
                           const std::filesystem::path& out);
std::vector<ManifestRecord> read_manifest(const std::filesystem::path& in);

struct ManifestIssue {
  std::size_t line = 0;
  std::string synthetic_path;
  std::string kind;  ///< label_mismatch, missing_file, config_hash_mismatch, unknown_source
  std::string message;
};

struct ManifestReport {
  std::size_t records = 0;
  std::vector<ManifestIssue> issues;
  bool ok() const noexcept { return issues.empty(); }
};

/// Checks labels against the source dataset, file presence and that all
/// records share one config hash (the first record's unless `expected_hash`
/// is given). Throws ParseFailure.
ManifestReport verify_manifest(const std::filesystem::path& manifest,
                               const DatasetIndex& idx,
                               const std::optional<std::string>& expected_hash = {});

/// Single-consumer writer: producers submit records tagged with their
/// enumeration index from any thread; lines hit the file in index order.
class OrderedManifestWriter {
public:
  explicit OrderedManifestWriter(const std::filesystem::path& out);
  ~OrderedManifestWriter();

  OrderedManifestWriter(const OrderedManifestWriter&) = delete;
  OrderedManifestWriter& operator=(const OrderedManifestWriter&) = delete;

  void submit(std::size_t seq, ManifestRecord record);
  /// Flushes and closes; throws IoFailure if a gap remains or a write failed.
  std::size_t finish();

private:
  void drain_locked();

  std::mutex mutex_;
  std::FILE* file_ = nullptr;
  std::size_t next_ = 0;
  std::map<std::size_t, ManifestRecord> pending_;
  bool failed_ = false;
};

}  // namespace rfaug

// SPDX-License-Identifier: Apache-2.0

#include "rfaug/manifest.hpp"

#include <fstream>

#include "json.hpp"

namespace rfaug {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

}  // namespace

std::string to_json_line(const ManifestRecord& r) {
  // Keys land in lexicographic order (nlohmann::json objects are sorted),
  // so equal records always serialise to equal bytes.
  const json j = {
      {"synthetic_path", r.synthetic_path},
      {"roi_source", r.roi_source},
      {"bg_source", r.bg_source},
      {"label", r.label},
      {"roi_mode", to_string(r.roi_mode)},
      {"viewpoint", r.viewpoint},
      {"config_hash", r.config_hash},
      {"native_size", {{"width", r.native_size.width}, {"height", r.native_size.height}}},
  };
  return j.dump();
}

ManifestRecord parse_manifest_line(std::string_view line) {
  try {
    const json j = json::parse(line);
    ManifestRecord r;
    r.synthetic_path = j.at("synthetic_path").get<std::string>();
    r.roi_source = j.at("roi_source").get<std::string>();
    r.bg_source = j.at("bg_source").get<std::string>();
    r.label = j.at("label").get<std::string>();
    r.roi_mode = parse_roi_mode(j.at("roi_mode").get<std::string>());
    r.viewpoint = j.at("viewpoint").get<std::string>();
    r.config_hash = j.at("config_hash").get<std::string>();
    r.native_size = {j.at("native_size").at("width").get<int>(),
                     j.at("native_size").at("height").get<int>()};
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseFailure, e.what());
  } catch (const Error& e) {
    throw Error(ErrorCode::ParseFailure, e.what());
  }
}

std::size_t write_manifest(std::span<const ManifestRecord> records, const fs::path& out) {
  std::ofstream os(out, std::ios::binary | std::ios::trunc);
  if (!os) throw Error(ErrorCode::IoFailure, "cannot open " + out.string());
  for (const auto& r : records) os << to_json_line(r) << '\n';
  os.flush();
  if (!os) throw Error(ErrorCode::IoFailure, "write failed: " + out.string());
  return records.size();
}

std::vector<ManifestRecord> read_manifest(const fs::path& in) {
  std::ifstream is(in, std::ios::binary);
  if (!is) throw Error(ErrorCode::IoFailure, "cannot open " + in.string());
  std::vector<ManifestRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(parse_manifest_line(line));
    } catch (const Error& e) {
      throw Error(ErrorCode::ParseFailure,
                  in.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

ManifestReport verify_manifest(const fs::path& manifest, const DatasetIndex& idx,
                               const std::optional<std::string>& expected_hash) {
  const auto records = read_manifest(manifest);
  const fs::path base = manifest.parent_path();
  ManifestReport report;
  report.records = records.size();
  std::optional<std::string> hash = expected_hash;
  for (std::size_t k = 0; k < records.size(); ++k) {
    const ManifestRecord& r = records[k];
    auto add = [&](std::string kind, std::string message) {
      report.issues.push_back({k + 1, r.synthetic_path, std::move(kind), std::move(message)});
    };
    const auto roi = idx.find(r.roi_source);
    if (!roi) {
      add("unknown_source", "roi_source '" + r.roi_source + "' not in dataset");
    } else if (idx.record(*roi).label != r.label) {
      add("label_mismatch", "label '" + r.label + "' but ROI donor is labelled '" +
                                idx.record(*roi).label + "'");
    }
    if (!idx.find(r.bg_source)) {
      add("unknown_source", "bg_source '" + r.bg_source + "' not in dataset");
    }
    std::error_code ec;
    if (!fs::is_regular_file(base / r.synthetic_path, ec)) {
      add("missing_file", (base / r.synthetic_path).string());
    }
    if (!hash) hash = r.config_hash;
    if (r.config_hash != *hash) {
      add("config_hash_mismatch", "config_hash " + r.config_hash + " != " + *hash);
    }
  }
  return report;
}

OrderedManifestWriter::OrderedManifestWriter(const fs::path& out) {
  file_ = std::fopen(out.c_str(), "wb");
  if (!file_) throw Error(ErrorCode::IoFailure, "cannot open " + out.string());
}

OrderedManifestWriter::~OrderedManifestWriter() {
  if (file_) std::fclose(file_);
}

void OrderedManifestWriter::submit(std::size_t seq, ManifestRecord record) {
  std::lock_guard lock(mutex_);
  if (seq < next_ || pending_.count(seq)) {
    throw Error(ErrorCode::InvalidArgument, "manifest sequence " + std::to_string(seq) + " submitted twice");
  }
  pending_.emplace(seq, std::move(record));
  drain_locked();
}

void OrderedManifestWriter::drain_locked() {
  for (auto it = pending_.begin(); it != pending_.end() && it->first == next_;
       it = pending_.erase(it)) {
    const std::string line = to_json_line(it->second) + "\n";
    if (!file_ || std::fwrite(line.data(), 1, line.size(), file_) != line.size()) failed_ = true;
    ++next_;
  }
}

std::size_t OrderedManifestWriter::finish() {
  std::lock_guard lock(mutex_);
  if (!pending_.empty()) {
    throw Error(ErrorCode::IoFailure, "manifest has a gap before sequence " +
                                          std::to_string(pending_.begin()->first));
  }
  if (file_) {
    if (std::fclose(file_) != 0) failed_ = true;
    file_ = nullptr;
  }
  if (failed_) throw Error(ErrorCode::IoFailure, "manifest write failed");
  return next_;
}

}  // namespace rfaug

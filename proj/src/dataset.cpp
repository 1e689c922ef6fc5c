// SPDX-License-Identifier: Apache-2.0

#include "rfaug/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "json.hpp"
#include "rfaug/png_io.hpp"

namespace rfaug {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path metadata_path(const fs::path& root, const fs::path& metadata) {
  return metadata.empty() ? root / "meta.jsonl" : metadata;
}

std::string scalar_to_string(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number() || v.is_boolean()) return v.dump();
  throw Error(ErrorCode::MetadataParse, "attribute values must be scalars");
}

std::string required_string(const json& row, const char* key) {
  auto it = row.find(key);
  if (it == row.end() || !it->is_string()) {
    throw Error(ErrorCode::MetadataParse, std::string("missing string field '") + key + "'");
  }
  return it->get<std::string>();
}

DatasetHeader parse_header(const json& line) {
  const json& h = line.at("header");
  if (!h.is_object()) throw Error(ErrorCode::MetadataParse, "header must be an object");
  DatasetHeader out;
  if (auto it = h.find("viewpoints"); it != h.end()) {
    out.viewpoints = it->get<std::vector<std::string>>();
  }
  if (auto it = h.find("attributes"); it != h.end()) {
    out.attributes = it->get<std::vector<std::string>>();
  }
  if (out.viewpoints.empty()) {
    throw Error(ErrorCode::MetadataParse, "header declares no viewpoints");
  }
  return out;
}

SampleRecord parse_row(const json& row, bool allow_unlabeled) {
  if (!row.is_object()) throw Error(ErrorCode::MetadataParse, "row is not an object");
  SampleRecord r;
  r.sample_id = required_string(row, "sample_id");
  r.image_path = required_string(row, "image");
  r.mask_path = required_string(row, "mask");
  if (auto it = row.find("label"); it != row.end() && !it->is_null()) {
    if (!it->is_string()) throw Error(ErrorCode::MetadataParse, "label must be a string");
    r.label = it->get<std::string>();
  }
  if (r.sample_id.empty()) throw Error(ErrorCode::MetadataParse, "empty sample_id");
  if (r.label.empty() && !allow_unlabeled) {
    throw Error(ErrorCode::MetadataParse, "record '" + r.sample_id + "' has no label");
  }
  r.viewpoint = required_string(row, "viewpoint");
  if (auto it = row.find("attributes"); it != row.end() && !it->is_null()) {
    if (!it->is_object()) throw Error(ErrorCode::MetadataParse, "attributes must be an object");
    for (const auto& [k, v] : it->items()) r.attributes.emplace(k, scalar_to_string(v));
  }
  return r;
}

struct ScanResult {
  DatasetHeader header;
  std::vector<SampleRecord> records;
  std::vector<RecordStats> stats;
};

// Reads the metadata and every referenced file. `report` receives each
// problem; it may throw to abort the scan.
using IssueSink = std::function<void(ErrorCode, ValidationIssue)>;

ScanResult scan(const fs::path& root, const fs::path& metadata,
                const LoadOptions& opts, const IssueSink& report) {
  const fs::path meta = metadata_path(root, metadata);
  std::ifstream in(meta);
  if (!in) throw Error(ErrorCode::MissingFile, meta.string());

  ScanResult out;
  std::set<std::string> seen;
  bool have_header = false;
  std::string text;
  std::size_t line_no = 0;
  while (std::getline(in, text)) {
    ++line_no;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;

    auto issue = [&](ErrorCode code, std::string kind, std::string sample_id,
                     std::string message) {
      report(code, ValidationIssue{line_no, std::move(sample_id), std::move(kind),
                                   std::move(message)});
    };

    json row;
    try {
      row = json::parse(text);
    } catch (const json::exception& e) {
      issue(ErrorCode::MetadataParse, "metadata_parse", "", e.what());
      continue;
    }

    if (!have_header) {
      try {
        if (!row.is_object() || !row.contains("header")) {
          throw Error(ErrorCode::MetadataParse, "first record must be the dataset header");
        }
        out.header = parse_header(row);
      } catch (const Error& e) {
        issue(ErrorCode::MetadataParse, "metadata_parse", "", e.what());
        // Without a vocabulary nothing else can be checked.
        return out;
      } catch (const json::exception& e) {
        issue(ErrorCode::MetadataParse, "metadata_parse", "", e.what());
        return out;
      }
      have_header = true;
      continue;
    }

    SampleRecord rec;
    try {
      rec = parse_row(row, opts.allow_unlabeled_backgrounds);
    } catch (const Error& e) {
      issue(ErrorCode::MetadataParse, "metadata_parse", "", e.what());
      continue;
    } catch (const json::exception& e) {
      issue(ErrorCode::MetadataParse, "metadata_parse", "", e.what());
      continue;
    }

    if (!seen.insert(rec.sample_id).second) {
      issue(ErrorCode::MetadataParse, "metadata_parse", rec.sample_id,
            "duplicate sample_id '" + rec.sample_id + "'");
      continue;
    }
    if (!out.header.has_viewpoint(rec.viewpoint)) {
      issue(ErrorCode::MetadataParse, "unknown_viewpoint", rec.sample_id,
            "viewpoint '" + rec.viewpoint + "' not declared in header");
      continue;
    }

    RecordStats st;
    bool files_ok = true;
    for (const std::string* rel : {&rec.image_path, &rec.mask_path}) {
      std::error_code ec;
      if (!fs::is_regular_file(root / *rel, ec)) {
        issue(ErrorCode::MissingFile, "missing_file", rec.sample_id,
              (root / *rel).string());
        files_ok = false;
      }
    }
    if (!files_ok) continue;

    try {
      const Size img = png::read_size(root / rec.image_path);
      const BinaryMask mask = binarize_mask(png::read_gray(root / rec.mask_path),
                                            opts.mask_threshold);
      if (mask.size() != img) {
        std::ostringstream msg;
        msg << "image is " << img.width << "x" << img.height << ", mask is "
            << mask.width() << "x" << mask.height();
        issue(ErrorCode::DimensionMismatch, "dimension_mismatch", rec.sample_id, msg.str());
        continue;
      }
      st.size = img;
      st.area = mask_area(mask);
      if (st.area > 0) st.bbox = mask_bbox(mask);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::IoFailure && e.code() != ErrorCode::MissingFile) throw;
      issue(e.code(), e.code() == ErrorCode::MissingFile ? "missing_file" : "io_failure",
            rec.sample_id, e.what());
      continue;
    }

    if (st.area == 0) {
      issue(ErrorCode::EmptyMask, "empty_mask", rec.sample_id, "mask has no foreground");
    }
    out.records.push_back(std::move(rec));
    out.stats.push_back(st);
  }
  if (!have_header) {
    report(ErrorCode::MetadataParse,
           ValidationIssue{line_no, "", "metadata_parse", "metadata has no header record"});
  }
  return out;
}

}  // namespace

bool DatasetHeader::has_viewpoint(const std::string& v) const {
  return std::find(viewpoints.begin(), viewpoints.end(), v) != viewpoints.end();
}

bool DatasetHeader::has_attribute(const std::string& a) const {
  return std::find(attributes.begin(), attributes.end(), a) != attributes.end();
}

std::optional<std::size_t> DatasetIndex::find(const std::string& sample_id) const {
  auto it = by_id_.find(sample_id);
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

bool DatasetIndex::usable_as_roi(std::size_t i) const {
  return stats_.at(i).area > 0 && !records_[i].label.empty();
}

bool DatasetIndex::usable_as_background(std::size_t i) const {
  return stats_.at(i).area > 0;
}

RasterImage DatasetIndex::load_image(std::size_t i) const {
  RasterImage img = png::read_rgb(root_ / records_.at(i).image_path);
  if (img.size() != stats_[i].size) {
    throw Error(ErrorCode::DimensionMismatch, records_[i].sample_id + ": image changed on disk");
  }
  return img;
}

BinaryMask DatasetIndex::load_mask(std::size_t i) const {
  BinaryMask m = binarize_mask(png::read_gray(root_ / records_.at(i).mask_path),
                               options_.mask_threshold);
  if (m.size() != stats_[i].size) {
    throw Error(ErrorCode::DimensionMismatch, records_[i].sample_id + ": mask changed on disk");
  }
  return m;
}

DatasetIndex load_dataset(const fs::path& root, const fs::path& metadata,
                          const LoadOptions& options) {
  // Empty masks are the only problem that does not stop a load.
  ScanResult scanned = scan(root, metadata, options, [](ErrorCode code, ValidationIssue issue) {
    if (code == ErrorCode::EmptyMask) return;
    std::string where = "line " + std::to_string(issue.line);
    if (!issue.sample_id.empty()) where += " (" + issue.sample_id + ")";
    throw Error(code, where + ": " + issue.message);
  });
  DatasetIndex idx;
  idx.root_ = root;
  idx.header_ = std::move(scanned.header);
  idx.options_ = options;
  idx.records_ = std::move(scanned.records);
  idx.stats_ = std::move(scanned.stats);
  for (std::size_t i = 0; i < idx.records_.size(); ++i) {
    idx.by_id_.emplace(idx.records_[i].sample_id, i);
  }
  return idx;
}

ValidationReport validate_dataset(const fs::path& root, const fs::path& metadata,
                                  const LoadOptions& options) {
  ValidationReport report;
  ScanResult scanned = scan(root, metadata, options, [&](ErrorCode, ValidationIssue issue) {
    report.issues.push_back(std::move(issue));
  });
  report.records = scanned.records.size();
  return report;
}

void write_metadata(const DatasetIndex& idx, const fs::path& out) {
  std::ofstream os(out, std::ios::binary | std::ios::trunc);
  if (!os) throw Error(ErrorCode::IoFailure, out.string());
  json header = {{"header",
                  {{"viewpoints", idx.header().viewpoints},
                   {"attributes", idx.header().attributes}}}};
  os << header.dump() << '\n';
  for (const SampleRecord& r : idx.records()) {
    json row = {{"sample_id", r.sample_id},   {"image", r.image_path},
                {"mask", r.mask_path},        {"label", r.label},
                {"viewpoint", r.viewpoint},   {"attributes", r.attributes}};
    os << row.dump() << '\n';
  }
  if (!os) throw Error(ErrorCode::IoFailure, out.string());
}

}  // namespace rfaug

// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "rfaug/dataset.hpp"

namespace rfaug {

enum class RoiMode { full_body, upper_body };

/// Direction of a threshold test. `as_written` passes when the value is
/// below the threshold, `similarity` when it is at or above it.
enum class ComparisonRule { as_written, similarity };

std::string_view to_string(RoiMode m) noexcept;
std::string_view to_string(ComparisonRule r) noexcept;
/// Accepts both snake_case and kebab-case spellings.
RoiMode parse_roi_mode(std::string_view s);
ComparisonRule parse_rule(std::string_view s);

struct PairingConfig {
  double t_s = 0.8;
  double t_i = 0.7;
  ComparisonRule size_rule = ComparisonRule::as_written;
  ComparisonRule shape_rule = ComparisonRule::as_written;
  bool require_same_viewpoint = true;
  std::vector<std::string> match_attributes;

  /// Throws InvalidArgument on thresholds outside (0,1] or attribute names
  /// missing from the schema (when a header is given).
  void validate(const DatasetHeader* schema = nullptr) const;

  friend bool operator==(const PairingConfig&, const PairingConfig&) = default;
};

inline bool rule_passes(ComparisonRule rule, double value, double threshold) {
  return rule == ComparisonRule::as_written ? value < threshold
                                            : value >= threshold;
}

/// min(a,b)/max(a,b); both areas must be positive.
double size_ratio(std::int64_t a, std::int64_t b);

struct CompositeRecipe {
  std::string roi_source;
  std::string bg_source;
  RoiMode roi_mode = RoiMode::full_body;
  std::string label;  ///< always the ROI donor's label

  friend bool operator==(const CompositeRecipe&, const CompositeRecipe&) = default;
};

/// First failing constraint, in evaluation order.
enum class Rejection { none, unusable, size, shape, viewpoint, attributes };

struct RejectionStats {
  std::uint64_t considered = 0;
  std::uint64_t accepted = 0;
  std::uint64_t size = 0;
  std::uint64_t shape = 0;
  std::uint64_t viewpoint = 0;
  std::uint64_t attributes = 0;
  /// Ordered pairs skipped because one side cannot donate (empty mask or,
  /// for ROI donors, no label). Not part of `considered`.
  std::uint64_t unusable = 0;

  RejectionStats& operator+=(const RejectionStats& o);
  friend bool operator==(const RejectionStats&, const RejectionStats&) = default;
};

/// Size and shape test straight from the masks: cached areas for the ratio,
/// freshly decoded and normalised masks for the IoU. Throws EmptyMask.
bool size_shape_compatible(const DatasetIndex& idx, std::size_t i,
                           std::size_t j, const PairingConfig& cfg);

/// Viewpoint and attribute equality. Throws MissingAttribute.
bool metadata_compatible(const SampleRecord& i, const SampleRecord& j,
                         const PairingConfig& cfg);

/// Bit-packed normalised mask for fast IoU.
class PackedShape {
public:
  PackedShape() = default;
  explicit PackedShape(const BinaryMask& m);

  std::int64_t count() const noexcept { return count_; }
  friend double packed_iou(const PackedShape& a, const PackedShape& b);

private:
  std::vector<std::uint64_t> words_;
  std::int64_t count_ = 0;
};

struct PairEnumeration {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  ///< (roi, bg) indices
  RejectionStats stats;
};

/// Pair evaluation over one dataset with the expensive parts cached:
/// normalised shapes are built once per record, shape IoU is memoised per
/// unordered pair, and size-ratio pruning uses records sorted by area.
/// All const members are safe to call concurrently.
class PairingEngine {
public:
  PairingEngine(const DatasetIndex& idx, PairingConfig cfg, int workers = 1);

  const DatasetIndex& index() const noexcept { return *idx_; }
  const PairingConfig& config() const noexcept { return cfg_; }

  double shape_iou(std::size_t i, std::size_t j) const;
  Rejection evaluate(std::size_t i, std::size_t j) const;
  bool compatible(std::size_t i, std::size_t j) const {
    return evaluate(i, j) == Rejection::none;
  }

  /// Compatible background donors of ROI donor `i`, in index order.
  std::vector<std::size_t> partners(std::size_t i, RejectionStats* stats = nullptr) const;

  /// Every compatible ordered pair, i-major then j-minor.
  PairEnumeration enumerate(int workers = 1) const;

  CompositeRecipe make_recipe(std::size_t roi, std::size_t bg, RoiMode mode) const;

private:
  static constexpr std::size_t kShards = 64;
  struct MemoShard {
    std::mutex mutex;
    std::unordered_map<std::uint64_t, double> values;
  };

  /// Indices j (sorted by area) whose size test against i passes.
  std::vector<std::size_t> size_candidates(std::size_t i) const;

  const DatasetIndex* idx_;
  PairingConfig cfg_;
  std::vector<PackedShape> shapes_;
  std::vector<std::size_t> by_area_;  ///< usable background donors, ascending area
  std::unique_ptr<std::array<MemoShard, kShards>> memo_;
};

std::vector<CompositeRecipe> candidate_pairs(const DatasetIndex& idx,
                                             const PairingConfig& cfg,
                                             RoiMode mode = RoiMode::full_body,
                                             int workers = 1);

}  // namespace rfaug

// SPDX-License-Identifier: Apache-2.0

#include "rfaug/pairing.hpp"

#include <algorithm>
#include <bit>

#include "rfaug/worker_pool.hpp"

namespace rfaug {

std::string_view to_string(RoiMode m) noexcept {
  return m == RoiMode::full_body ? "full_body" : "upper_body";
}

std::string_view to_string(ComparisonRule r) noexcept {
  return r == ComparisonRule::as_written ? "as_written" : "similarity";
}

RoiMode parse_roi_mode(std::string_view s) {
  if (s == "full_body" || s == "full-body") return RoiMode::full_body;
  if (s == "upper_body" || s == "upper-body") return RoiMode::upper_body;
  throw Error(ErrorCode::InvalidArgument, "unknown roi mode '" + std::string(s) + "'");
}

ComparisonRule parse_rule(std::string_view s) {
  if (s == "as_written" || s == "as-written") return ComparisonRule::as_written;
  if (s == "similarity") return ComparisonRule::similarity;
  throw Error(ErrorCode::InvalidArgument, "unknown comparison rule '" + std::string(s) + "'");
}

void PairingConfig::validate(const DatasetHeader* schema) const {
  auto in_range = [](double t) { return t > 0.0 && t <= 1.0; };
  if (!in_range(t_s)) throw Error(ErrorCode::InvalidArgument, "t_s must lie in (0,1]");
  if (!in_range(t_i)) throw Error(ErrorCode::InvalidArgument, "t_i must lie in (0,1]");
  if (schema) {
    for (const auto& a : match_attributes) {
      if (!schema->has_attribute(a)) {
        throw Error(ErrorCode::InvalidArgument,
                    "match attribute '" + a + "' is not in the dataset schema");
      }
    }
  }
}

double size_ratio(std::int64_t a, std::int64_t b) {
  if (a <= 0 || b <= 0) throw Error(ErrorCode::EmptyMask, "size ratio of an empty mask");
  return static_cast<double>(std::min(a, b)) / static_cast<double>(std::max(a, b));
}

RejectionStats& RejectionStats::operator+=(const RejectionStats& o) {
  considered += o.considered;
  accepted += o.accepted;
  size += o.size;
  shape += o.shape;
  viewpoint += o.viewpoint;
  attributes += o.attributes;
  unusable += o.unusable;
  return *this;
}

bool size_shape_compatible(const DatasetIndex& idx, std::size_t i, std::size_t j,
                           const PairingConfig& cfg) {
  const std::int64_t ai = idx.stats(i).area;
  const std::int64_t aj = idx.stats(j).area;
  if (ai == 0 || aj == 0) {
    throw Error(ErrorCode::EmptyMask, "size/shape test needs nonempty masks");
  }
  if (!rule_passes(cfg.size_rule, size_ratio(ai, aj), cfg.t_s)) return false;
  const double iou = mask_iou(normalize_shape(idx.load_mask(i)),
                              normalize_shape(idx.load_mask(j)));
  return rule_passes(cfg.shape_rule, iou, cfg.t_i);
}

namespace {

bool attributes_match(const SampleRecord& i, const SampleRecord& j,
                      const std::vector<std::string>& names) {
  for (const auto& name : names) {
    auto a = i.attributes.find(name);
    auto b = j.attributes.find(name);
    if (a == i.attributes.end()) {
      throw Error(ErrorCode::MissingAttribute, i.sample_id + " lacks attribute '" + name + "'");
    }
    if (b == j.attributes.end()) {
      throw Error(ErrorCode::MissingAttribute, j.sample_id + " lacks attribute '" + name + "'");
    }
    if (a->second != b->second) return false;
  }
  return true;
}

bool viewpoints_match(const SampleRecord& i, const SampleRecord& j, const PairingConfig& cfg) {
  return !cfg.require_same_viewpoint || i.viewpoint == j.viewpoint;
}

}  // namespace

bool metadata_compatible(const SampleRecord& i, const SampleRecord& j,
                         const PairingConfig& cfg) {
  // Attributes are checked even when the viewpoints differ so that a missing
  // attribute is always reported.
  const bool attrs = attributes_match(i, j, cfg.match_attributes);
  return viewpoints_match(i, j, cfg) && attrs;
}

PackedShape::PackedShape(const BinaryMask& m) {
  auto bits = m.bits();
  words_.assign((bits.size() + 63) / 64, 0);
  for (std::size_t k = 0; k < bits.size(); ++k) {
    if (bits[k]) {
      words_[k / 64] |= std::uint64_t{1} << (k % 64);
      ++count_;
    }
  }
}

double packed_iou(const PackedShape& a, const PackedShape& b) {
  if (a.words_.size() != b.words_.size()) {
    throw Error(ErrorCode::DimensionMismatch, "packed shapes differ in size");
  }
  std::int64_t inter = 0;
  for (std::size_t k = 0; k < a.words_.size(); ++k) {
    inter += std::popcount(a.words_[k] & b.words_[k]);
  }
  const std::int64_t uni = a.count_ + b.count_ - inter;
  if (uni == 0) return 0.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

PairingEngine::PairingEngine(const DatasetIndex& idx, PairingConfig cfg, int workers)
    : idx_(&idx),
      cfg_(std::move(cfg)),
      shapes_(idx.size()),
      memo_(std::make_unique<std::array<MemoShard, kShards>>()) {
  cfg_.validate(&idx.header());
  parallel_for(idx.size(), workers, [&](std::size_t i) {
    if (idx.usable_as_background(i)) shapes_[i] = PackedShape(normalize_shape(idx.load_mask(i)));
  });
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx.usable_as_background(i)) by_area_.push_back(i);
  }
  std::sort(by_area_.begin(), by_area_.end(), [&](std::size_t a, std::size_t b) {
    const auto aa = idx.stats(a).area;
    const auto ab = idx.stats(b).area;
    return aa != ab ? aa < ab : a < b;
  });
}

double PairingEngine::shape_iou(std::size_t i, std::size_t j) const {
  const std::uint64_t key =
      (static_cast<std::uint64_t>(std::min(i, j)) << 32) | static_cast<std::uint64_t>(std::max(i, j));
  MemoShard& shard = (*memo_)[key % kShards];
  {
    std::lock_guard lock(shard.mutex);
    if (auto it = shard.values.find(key); it != shard.values.end()) return it->second;
  }
  const double iou = packed_iou(shapes_.at(i), shapes_.at(j));
  std::lock_guard lock(shard.mutex);
  shard.values.emplace(key, iou);
  return iou;
}

Rejection PairingEngine::evaluate(std::size_t i, std::size_t j) const {
  if (i == j || !idx_->usable_as_roi(i) || !idx_->usable_as_background(j)) {
    return Rejection::unusable;
  }
  const double r = size_ratio(idx_->stats(i).area, idx_->stats(j).area);
  if (!rule_passes(cfg_.size_rule, r, cfg_.t_s)) return Rejection::size;
  if (!rule_passes(cfg_.shape_rule, shape_iou(i, j), cfg_.t_i)) return Rejection::shape;
  const SampleRecord& ri = idx_->record(i);
  const SampleRecord& rj = idx_->record(j);
  if (!viewpoints_match(ri, rj, cfg_)) return Rejection::viewpoint;
  if (!attributes_match(ri, rj, cfg_.match_attributes)) return Rejection::attributes;
  return Rejection::none;
}

std::vector<std::size_t> PairingEngine::size_candidates(std::size_t i) const {
  const std::int64_t a = idx_->stats(i).area;
  const double ts = cfg_.t_s;
  // Ratio against `a` rises with area up to `a` and falls after it, so the
  // records passing ratio >= t_s form one contiguous run of by_area_.
  auto lo = std::partition_point(by_area_.begin(), by_area_.end(), [&](std::size_t j) {
    const auto aj = idx_->stats(j).area;
    return aj < a && size_ratio(a, aj) < ts;
  });
  auto hi = std::partition_point(by_area_.begin(), by_area_.end(), [&](std::size_t j) {
    const auto aj = idx_->stats(j).area;
    return aj <= a || size_ratio(a, aj) >= ts;
  });
  std::vector<std::size_t> out;
  if (cfg_.size_rule == ComparisonRule::similarity) {
    out.assign(lo, hi);
  } else {
    out.assign(by_area_.begin(), lo);
    out.insert(out.end(), hi, by_area_.end());
  }
  std::erase(out, i);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::size_t> PairingEngine::partners(std::size_t i, RejectionStats* stats) const {
  RejectionStats local;
  std::vector<std::size_t> out;
  const std::size_t n = idx_->size();
  if (!idx_->usable_as_roi(i)) {
    local.unusable = n - 1;
  } else {
    const std::size_t bg_usable = by_area_.size() - 1;  // i itself is in by_area_
    local.unusable = (n - 1) - bg_usable;
    local.considered = bg_usable;
    const auto cands = size_candidates(i);
    local.size = bg_usable - cands.size();
    for (std::size_t j : cands) {
      switch (evaluate(i, j)) {
        case Rejection::none:
          out.push_back(j);
          ++local.accepted;
          break;
        case Rejection::shape: ++local.shape; break;
        case Rejection::viewpoint: ++local.viewpoint; break;
        case Rejection::attributes: ++local.attributes; break;
        case Rejection::size:
        case Rejection::unusable:
          throw Error(ErrorCode::InvalidArgument, "size pruning disagrees with evaluate()");
      }
    }
  }
  if (stats) *stats += local;
  return out;
}

PairEnumeration PairingEngine::enumerate(int workers) const {
  const std::size_t n = idx_->size();
  std::vector<std::vector<std::size_t>> rows(n);
  std::vector<RejectionStats> row_stats(n);
  parallel_for(n, workers, [&](std::size_t i) { rows[i] = partners(i, &row_stats[i]); });

  PairEnumeration out;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j : rows[i]) out.pairs.emplace_back(i, j);
    out.stats += row_stats[i];
  }
  return out;
}

CompositeRecipe PairingEngine::make_recipe(std::size_t roi, std::size_t bg, RoiMode mode) const {
  return {idx_->record(roi).sample_id, idx_->record(bg).sample_id, mode,
          idx_->record(roi).label};
}

std::vector<CompositeRecipe> candidate_pairs(const DatasetIndex& idx, const PairingConfig& cfg,
                                             RoiMode mode, int workers) {
  PairingEngine engine(idx, cfg, workers);
  const PairEnumeration e = engine.enumerate(workers);
  std::vector<CompositeRecipe> out;
  out.reserve(e.pairs.size());
  for (auto [i, j] : e.pairs) out.push_back(engine.make_recipe(i, j, mode));
  return out;
}

}  // namespace rfaug

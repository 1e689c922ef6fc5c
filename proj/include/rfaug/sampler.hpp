// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rfaug/compositor.hpp"
#include "rfaug/dataset.hpp"
#include "rfaug/pairing.hpp"

namespace rfaug {

struct AugmentationPolicy {
  double probability = 0.3;
  std::uint64_t seed = 0;
  RoiMode roi_mode = RoiMode::full_body;

  void validate() const;
  friend bool operator==(const AugmentationPolicy&, const AugmentationPolicy&) = default;
};

/// Compatible background donors per ROI donor, index order.
class PartnerLists {
public:
  PartnerLists() = default;
  explicit PartnerLists(std::vector<std::vector<std::size_t>> lists)
      : lists_(std::move(lists)) {}

  std::size_t size() const noexcept { return lists_.size(); }
  const std::vector<std::size_t>& of(std::size_t i) const { return lists_.at(i); }
  std::map<std::string, std::vector<std::string>> by_id(const DatasetIndex& idx) const;

  friend bool operator==(const PartnerLists&, const PartnerLists&) = default;

private:
  std::vector<std::vector<std::size_t>> lists_;
};

PartnerLists partner_lists(const PairingEngine& engine, int workers = 1);
PartnerLists partner_lists(const DatasetIndex& idx, const PairingConfig& cfg,
                           int workers = 1);

struct AugmentDecision {
  bool drawn = false;   ///< u < probability
  std::optional<std::size_t> partner;  ///< set only when a composite is produced
  bool augmented() const noexcept { return partner.has_value(); }
};

struct AugmentResult {
  RasterImage image;
  std::string label;
  bool augmented = false;
  std::optional<CompositeRecipe> recipe;
  std::string provenance;  ///< empty on passthrough
};

struct SamplerCounters {
  std::uint64_t calls = 0;
  std::uint64_t augmented = 0;
  std::uint64_t passthrough_probability = 0;
  std::uint64_t passthrough_no_partner = 0;
};

/// On-the-fly policy: per (epoch, sample) a counter-based draw decides
/// whether the sample is replaced by a composite with a uniformly chosen
/// compatible background donor.
class Augmenter {
public:
  Augmenter(const DatasetIndex& idx, PairingConfig cfg, AugmentationPolicy policy,
            ComposeOptions opts = {}, int workers = 1);

  Augmenter(const Augmenter&) = delete;
  Augmenter& operator=(const Augmenter&) = delete;

  const DatasetIndex& index() const noexcept { return *idx_; }
  const AugmentationPolicy& policy() const noexcept { return policy_; }
  const PartnerLists& partners() const noexcept { return partners_; }

  /// No pixel work; throws IndexOutOfRange.
  AugmentDecision decide(std::size_t sample_index, std::uint64_t epoch) const;

  AugmentResult augment(std::size_t sample_index, std::uint64_t epoch) const;

  SamplerCounters counters() const;

private:
  const DatasetIndex* idx_;
  PairingConfig cfg_;
  AugmentationPolicy policy_;
  PairingEngine engine_;
  PartnerLists partners_;
  Compositor compositor_;
  mutable std::atomic<std::uint64_t> calls_{0};
  mutable std::atomic<std::uint64_t> augmented_{0};
  mutable std::atomic<std::uint64_t> skipped_probability_{0};
  mutable std::atomic<std::uint64_t> skipped_no_partner_{0};
};

}  // namespace rfaug

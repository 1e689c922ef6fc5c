// SPDX-License-Identifier: Apache-2.0

#include "rfaug/sampler.hpp"

#include "rfaug/random.hpp"
#include "rfaug/worker_pool.hpp"

namespace rfaug {
namespace {

constexpr std::uint64_t kDecisionStream = 0;
constexpr std::uint64_t kPartnerStream = 1;

}  // namespace

void AugmentationPolicy::validate() const {
  if (!(probability >= 0.0 && probability <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "augmentation probability must lie in [0,1]");
  }
}

std::map<std::string, std::vector<std::string>> PartnerLists::by_id(const DatasetIndex& idx) const {
  std::map<std::string, std::vector<std::string>> out;
  for (std::size_t i = 0; i < lists_.size(); ++i) {
    auto& ids = out[idx.record(i).sample_id];
    for (std::size_t j : lists_[i]) ids.push_back(idx.record(j).sample_id);
  }
  return out;
}

PartnerLists partner_lists(const PairingEngine& engine, int workers) {
  std::vector<std::vector<std::size_t>> lists(engine.index().size());
  parallel_for(lists.size(), workers, [&](std::size_t i) { lists[i] = engine.partners(i); });
  return PartnerLists(std::move(lists));
}

PartnerLists partner_lists(const DatasetIndex& idx, const PairingConfig& cfg, int workers) {
  return partner_lists(PairingEngine(idx, cfg, workers), workers);
}

Augmenter::Augmenter(const DatasetIndex& idx, PairingConfig cfg, AugmentationPolicy policy,
                     ComposeOptions opts, int workers)
    : idx_(&idx),
      cfg_(cfg),
      policy_(policy),
      engine_(idx, cfg, workers),
      partners_(partner_lists(engine_, workers)),
      compositor_(idx, std::move(cfg), opts, &engine_) {
  policy_.validate();
}

AugmentDecision Augmenter::decide(std::size_t sample_index, std::uint64_t epoch) const {
  if (sample_index >= idx_->size()) {
    throw Error(ErrorCode::IndexOutOfRange, "sample index " + std::to_string(sample_index) +
                                                " >= dataset size " + std::to_string(idx_->size()));
  }
  AugmentDecision d;
  const double u =
      rng::to_unit(rng::counter_hash(policy_.seed, epoch, sample_index, kDecisionStream));
  d.drawn = u < policy_.probability;
  if (!d.drawn) return d;
  const auto& list = partners_.of(sample_index);
  if (list.empty()) return d;
  const std::uint64_t h = rng::counter_hash(policy_.seed, epoch, sample_index, kPartnerStream);
  d.partner = list[rng::bounded(h, list.size())];
  return d;
}

AugmentResult Augmenter::augment(std::size_t sample_index, std::uint64_t epoch) const {
  const AugmentDecision d = decide(sample_index, epoch);
  calls_.fetch_add(1, std::memory_order_relaxed);
  AugmentResult r;
  if (!d.augmented()) {
    (d.drawn ? skipped_no_partner_ : skipped_probability_).fetch_add(1, std::memory_order_relaxed);
    r.image = idx_->load_image(sample_index);
    r.label = idx_->record(sample_index).label;
    return r;
  }
  CompositeRecipe recipe = engine_.make_recipe(sample_index, *d.partner, policy_.roi_mode);
  SyntheticSample s = compositor_.compose(recipe, policy_.seed);
  augmented_.fetch_add(1, std::memory_order_relaxed);
  r.image = std::move(s.image);
  r.label = std::move(s.label);
  r.augmented = true;
  r.recipe = std::move(recipe);
  r.provenance = std::move(s.provenance);
  return r;
}

SamplerCounters Augmenter::counters() const {
  return {calls_.load(), augmented_.load(), skipped_probability_.load(),
          skipped_no_partner_.load()};
}

}  // namespace rfaug

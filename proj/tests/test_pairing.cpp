// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <set>

#include "test_util.hpp"

using namespace rfaug;
using namespace rfaug::testing;

namespace {

SampleRecord rec(std::string vp, std::map<std::string, std::string> attrs) {
  SampleRecord r;
  r.sample_id = "x";
  r.label = "p";
  r.viewpoint = std::move(vp);
  r.attributes = std::move(attrs);
  return r;
}

std::vector<PairingConfig> oracle_configs() {
  std::vector<PairingConfig> out;
  for (double ti : {0.3, 0.7})
    for (auto sr : {ComparisonRule::as_written, ComparisonRule::similarity})
      for (auto ir : {ComparisonRule::as_written, ComparisonRule::similarity}) {
        PairingConfig c;
        c.t_s = 0.8;
        c.t_i = ti;
        c.size_rule = sr;
        c.shape_rule = ir;
        out.push_back(c);
      }
  PairingConfig attr;
  attr.size_rule = attr.shape_rule = ComparisonRule::similarity;
  attr.t_i = 0.3;
  attr.require_same_viewpoint = false;
  attr.match_attributes = {"age", "gender"};
  out.push_back(attr);
  return out;
}

}  // namespace

TEST(Pairing, SizeRuleExamples) {
  EXPECT_DOUBLE_EQ(size_ratio(100, 79), 0.79);
  EXPECT_DOUBLE_EQ(size_ratio(79, 100), 0.79);
  EXPECT_TRUE(rule_passes(ComparisonRule::as_written, size_ratio(100, 79), 0.8));
  EXPECT_FALSE(rule_passes(ComparisonRule::as_written, size_ratio(100, 100), 0.8));
  EXPECT_FALSE(rule_passes(ComparisonRule::similarity, size_ratio(100, 79), 0.8));
  EXPECT_TRUE(rule_passes(ComparisonRule::similarity, 0.8, 0.8));
  EXPECT_FALSE(rule_passes(ComparisonRule::as_written, 0.8, 0.8));
  EXPECT_THROW(size_ratio(0, 5), Error);
}

TEST(Pairing, IdenticalMasksFailTheLiteralSizeRule) {
  TempDir dir("pairid");
  TestCardOptions o;
  o.count = 2;
  o.cards_per_identity = 1;
  write_test_cards(dir.path(), o);
  // Overwrite both masks with the same rectangle.
  const DatasetIndex before = load_dataset(dir.path());
  const Size s0 = before.stats(0).size, s1 = before.stats(1).size;
  png::write_mask(dir.path() / before.record(0).mask_path, rect_mask(s0.width, s0.height, 5, 5, 24, 44));
  png::write_mask(dir.path() / before.record(1).mask_path, rect_mask(s1.width, s1.height, 5, 5, 24, 44));
  const DatasetIndex idx = load_dataset(dir.path());
  PairingConfig cfg;
  cfg.require_same_viewpoint = false;
  EXPECT_FALSE(size_shape_compatible(idx, 0, 1, cfg));
  EXPECT_EQ(PairingEngine(idx, cfg).evaluate(0, 1), Rejection::size);
  cfg.size_rule = ComparisonRule::similarity;
  EXPECT_EQ(PairingEngine(idx, cfg).evaluate(0, 1), Rejection::shape);
  cfg.shape_rule = ComparisonRule::similarity;
  EXPECT_EQ(PairingEngine(idx, cfg).evaluate(0, 1), Rejection::none);
  EXPECT_DOUBLE_EQ(PairingEngine(idx, cfg).shape_iou(0, 1), 1.0);
}

TEST(Pairing, MetadataRules) {
  PairingConfig cfg;
  EXPECT_TRUE(metadata_compatible(rec("front", {}), rec("front", {}), cfg));
  EXPECT_FALSE(metadata_compatible(rec("front", {}), rec("back", {}), cfg));
  cfg.require_same_viewpoint = false;
  EXPECT_TRUE(metadata_compatible(rec("front", {}), rec("back", {}), cfg));
  cfg.match_attributes = {"age"};
  EXPECT_FALSE(metadata_compatible(rec("front", {{"age", "adult"}}), rec("front", {{"age", "child"}}), cfg));
  EXPECT_TRUE(metadata_compatible(rec("front", {{"age", "adult"}}), rec("back", {{"age", "adult"}}), cfg));
  try {
    metadata_compatible(rec("front", {{"age", "adult"}}), rec("front", {}), cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MissingAttribute);
  }
}

TEST(Pairing, ConfigValidation) {
  PairingConfig cfg;
  cfg.t_s = 0.0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg.t_s = 1.5;
  EXPECT_THROW(cfg.validate(), Error);
  cfg.t_s = 1.0;
  EXPECT_NO_THROW(cfg.validate());
  DatasetHeader h{{"front"}, {"age"}};
  cfg.match_attributes = {"height"};
  EXPECT_THROW(cfg.validate(&h), Error);
  EXPECT_EQ(parse_rule("as-written"), ComparisonRule::as_written);
  EXPECT_EQ(parse_rule("similarity"), ComparisonRule::similarity);
  EXPECT_EQ(parse_roi_mode("upper-body"), RoiMode::upper_body);
  EXPECT_EQ(parse_roi_mode("full_body"), RoiMode::full_body);
  EXPECT_THROW(parse_roi_mode("torso"), Error);
}

TEST(Pairing, AgreesWithBruteForceOracle) {
  TempDir dir("pairoracle");
  make_cards(dir.path(), 20, 5);
  const DatasetIndex idx = load_dataset(dir.path());
  ASSERT_EQ(idx.size(), 20u);
  std::size_t accepted_total = 0;
  for (const PairingConfig& cfg : oracle_configs()) {
    const PairingEngine engine(idx, cfg, 2);
    std::set<std::pair<std::string, std::string>> expected;
    std::size_t checked = 0;
    for (std::size_t i = 0; i < idx.size(); ++i)
      for (std::size_t j = 0; j < idx.size(); ++j) {
        if (i == j) continue;
        ++checked;
        const bool want = pair_oracle(idx.root(), idx.record(i), idx.record(j), cfg);
        const bool got = size_shape_compatible(idx, i, j, cfg) &&
                         metadata_compatible(idx.record(i), idx.record(j), cfg);
        ASSERT_EQ(got, want) << i << "->" << j;
        ASSERT_EQ(engine.compatible(i, j), want) << i << "->" << j;
        if (want) expected.emplace(idx.record(i).sample_id, idx.record(j).sample_id);
      }
    EXPECT_EQ(checked, 380u);
    std::set<std::pair<std::string, std::string>> got;
    for (const auto& r : candidate_pairs(idx, cfg)) got.emplace(r.roi_source, r.bg_source);
    EXPECT_EQ(got, expected);
    accepted_total += expected.size();
  }
  EXPECT_GT(accepted_total, 0u);
}

TEST(Pairing, TautologyGivesAllOrderedPairs) {
  for (int n : {1, 3, 10}) {
    TempDir dir("pairn");
    make_cards(dir.path(), n, 9);
    const DatasetIndex idx = load_dataset(dir.path());
    const auto pairs = candidate_pairs(idx, tautological_config());
    EXPECT_EQ(pairs.size(), static_cast<std::size_t>(n * n - n));
    for (const auto& p : pairs) EXPECT_NE(p.roi_source, p.bg_source);
  }
}

TEST(Pairing, SymmetryLabelsAndCounters) {
  TempDir dir("pairsym");
  make_cards(dir.path(), 16, 21);
  const DatasetIndex idx = load_dataset(dir.path());
  PairingConfig cfg;
  cfg.require_same_viewpoint = false;
  const PairingEngine engine(idx, cfg);
  for (std::size_t i = 0; i < idx.size(); ++i)
    for (std::size_t j = 0; j < idx.size(); ++j) {
      if (i == j) continue;
      EXPECT_EQ(engine.compatible(i, j), engine.compatible(j, i));
      EXPECT_DOUBLE_EQ(engine.shape_iou(i, j), engine.shape_iou(j, i));
      EXPECT_EQ(engine.make_recipe(i, j, RoiMode::upper_body).label, idx.record(i).label);
    }
  const PairEnumeration e = engine.enumerate(3);
  const RejectionStats& s = e.stats;
  EXPECT_EQ(s.considered + s.unusable, 16u * 15u);
  EXPECT_EQ(s.considered, s.accepted + s.size + s.shape + s.viewpoint + s.attributes);
  EXPECT_EQ(s.accepted, e.pairs.size());
  for (std::size_t k = 1; k < e.pairs.size(); ++k) EXPECT_LT(e.pairs[k - 1], e.pairs[k]);
  for (const auto& r : candidate_pairs(idx, cfg, RoiMode::full_body))
    EXPECT_EQ(r.label, idx.record(*idx.find(r.roi_source)).label);
}

TEST(Pairing, EmptyMasksAreUnusable) {
  TempDir dir("pairempty");
  make_cards(dir.path(), 4, 2);
  DatasetIndex first = load_dataset(dir.path());
  const Size s = first.stats(0).size;
  png::write_mask(dir.path() / first.record(0).mask_path, BinaryMask(s.width, s.height));
  const DatasetIndex idx = load_dataset(dir.path());
  const PairingEngine engine(idx, tautological_config());
  EXPECT_EQ(engine.evaluate(0, 1), Rejection::unusable);
  EXPECT_EQ(engine.evaluate(1, 0), Rejection::unusable);
  const PairEnumeration e = engine.enumerate();
  EXPECT_EQ(e.pairs.size(), 6u);
  EXPECT_EQ(e.stats.unusable, 6u);
  EXPECT_THROW(size_shape_compatible(idx, 0, 1, tautological_config()), Error);
}

TEST(Pairing, DeterministicAcrossWorkerCounts) {
  TempDir dir("pairw");
  make_cards(dir.path(), 18, 4);
  const DatasetIndex idx = load_dataset(dir.path());
  PairingConfig cfg;
  cfg.require_same_viewpoint = false;
  const PairEnumeration a = PairingEngine(idx, cfg, 1).enumerate(1);
  const PairEnumeration b = PairingEngine(idx, cfg, 8).enumerate(8);
  EXPECT_EQ(a.pairs, b.pairs);
  EXPECT_EQ(a.stats, b.stats);
  const PairingEngine e(idx, cfg);
  for (std::size_t i = 0; i < idx.size(); ++i) {
    std::vector<std::size_t> want;
    for (const auto& [r, g] : a.pairs)
      if (r == i) want.push_back(g);
    EXPECT_EQ(e.partners(i), want);
  }
}

TEST(Pairing, PackedIouMatchesOracle) {
  std::mt19937_64 rng(17);
  for (int k = 0; k < 40; ++k) {
    const BinaryMask a = random_nonempty_mask(rng, 37, 29, 0.4);
    const BinaryMask b = random_nonempty_mask(rng, 37, 29, 0.4);
    EXPECT_NEAR(packed_iou(PackedShape(a), PackedShape(b)), iou_oracle(a, b), 1e-12);
    EXPECT_EQ(PackedShape(a).count(), area_oracle(a));
  }
}

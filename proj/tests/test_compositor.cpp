// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace rfaug;
using namespace rfaug::testing;

namespace {

ErrorCode error_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::InvalidArgument;
}

RasterImage noise(std::mt19937_64& rng, int w, int h) {
  RasterImage img(w, h);
  for (auto& p : img.pixels()) p = {std::uint8_t(rng()), std::uint8_t(rng()), std::uint8_t(rng())};
  return img;
}

}  // namespace

TEST(Compositor, PixelContractOnTestCards) {
  TempDir dir("comppx");
  TestCardOptions o;
  o.count = 8;
  o.height = 64;
  o.min_width = 32;
  o.max_width = 64;
  write_test_cards(dir.path(), o);
  const DatasetIndex idx = load_dataset(dir.path());
  const PairingConfig cfg = tautological_config();
  const Compositor comp(idx, cfg);
  std::size_t n = 0;
  for (RoiMode mode : {RoiMode::full_body, RoiMode::upper_body})
    for (const auto& r : candidate_pairs(idx, cfg, mode)) {
      const SyntheticSample s = comp.compose(r);
      ASSERT_EQ(pixel_contract_violation(idx, s), "") << r.roi_source << " in " << r.bg_source;
      ++n;
    }
  EXPECT_EQ(n, 2u * 56u);
}

TEST(Compositor, InMemoryRandomDonors) {
  std::mt19937_64 rng(33);
  ComposeOptions opts;
  for (int k = 0; k < 10; ++k) {
    const RasterImage ri = noise(rng, 20 + k, 30), bi = noise(rng, 30, 24 + k);
    const BinaryMask rm = rect_mask(20 + k, 30, 3, 4, 12 + k / 2, 25);
    const BinaryMask bm = rect_mask(30, 24 + k, 8, 6, 20, 18);
    const BackgroundPlate plate = make_background_plate(bi, bm, RoiMode::full_body, opts);
    const SyntheticSample s = compose_onto_plate(replicate_pad_to_square(ri, rm), plate,
                                                 RoiMode::full_body, opts);
    const PaddedSample pb = pad_oracle(bi, bm);
    const BinaryMask hole = minkowski_oracle(pb.mask, 7);
    EXPECT_EQ(s.hole, hole);
    int placed = 0;
    for (int y = 0; y < s.image.height(); ++y)
      for (int x = 0; x < s.image.width(); ++x) {
        placed += s.placed_mask.get(x, y);
        if (!s.placed_mask.get(x, y) && !hole.get(x, y)) { ASSERT_EQ(s.image.at(x, y), pb.image.at(x, y)); }
        if (s.placed_mask.get(x, y)) {
          ASSERT_GE(x, s.placement.x0);
          ASSERT_LE(x, s.placement.x1);
          ASSERT_GE(y, s.placement.y0);
          ASSERT_LE(y, s.placement.y1);
        }
      }
    EXPECT_GT(placed, 0);
  }
}

TEST(Compositor, FullImageRoiMaskCoversTheAnchorBox) {
  std::mt19937_64 rng(34);
  const RasterImage ri = noise(rng, 16, 16);
  const RasterImage bi = noise(rng, 16, 16);
  ComposeOptions opts;
  const BackgroundPlate plate =
      make_background_plate(bi, rect_mask(16, 16, 4, 4, 11, 11), RoiMode::full_body, opts);
  const SyntheticSample s =
      compose_onto_plate(replicate_pad_to_square(ri, BinaryMask(16, 16, true)), plate,
                         RoiMode::full_body, opts);
  EXPECT_EQ(s.placed_mask, rect_mask(16, 16, 4, 4, 11, 11));
  EXPECT_EQ(s.placement, (BoundingBox{4, 4, 11, 11}));
}

TEST(Compositor, EmptyMasksAreRejected) {
  ComposeOptions opts;
  const RasterImage img(16, 16);
  EXPECT_EQ(error_of([&] { make_background_plate(img, BinaryMask(16, 16), RoiMode::full_body, opts); }),
            ErrorCode::EmptyMask);
  // A hole that swallows the whole plate leaves nothing to inpaint from.
  EXPECT_EQ(error_of([&] {
              make_background_plate(RasterImage(8, 8), rect_mask(8, 8, 2, 2, 4, 4), RoiMode::full_body, opts);
            }),
            ErrorCode::FullMask);
  const BackgroundPlate plate =
      make_background_plate(img, rect_mask(16, 16, 6, 6, 8, 8), RoiMode::full_body, opts);
  EXPECT_EQ(error_of([&] {
              compose_onto_plate(replicate_pad_to_square(img, BinaryMask(16, 16)), plate,
                                 RoiMode::full_body, opts);
            }),
            ErrorCode::EmptyMask);
  EXPECT_EQ(error_of([&] { compose_upper_body_split(BinaryMask(5, 5), 0.5); }), ErrorCode::EmptyMask);
}

TEST(Compositor, UpperBodySplit) {
  const BinaryMask m = rect_mask(10, 20, 2, 0, 7, 19);
  auto [upper, lower] = compose_upper_body_split(m, 0.5);
  EXPECT_EQ(upper, rect_mask(10, 20, 2, 0, 7, 9));
  EXPECT_EQ(lower, rect_mask(10, 20, 2, 10, 7, 19));

  const BinaryMask tall = rect_mask(4, 100, 0, 0, 3, 99);
  auto [u99, l99] = compose_upper_body_split(tall, 0.99);
  EXPECT_EQ(area_oracle(l99), 4);
  EXPECT_EQ(l99, rect_mask(4, 100, 0, 99, 3, 99));
  EXPECT_EQ(area_oracle(u99), 4 * 99);

  std::mt19937_64 rng(35);
  for (int k = 0; k < 50; ++k) {
    const BinaryMask r = random_nonempty_mask(rng, 17, 23, 0.3);
    const double frac = 0.1 + 0.016 * k;
    auto [u, l] = compose_upper_body_split(r, frac);
    EXPECT_EQ(u, upper_oracle(r, frac));
    for (int y = 0; y < 23; ++y)
      for (int x = 0; x < 17; ++x) {
        EXPECT_FALSE(u.get(x, y) && l.get(x, y));
        EXPECT_EQ(u.get(x, y) || l.get(x, y), r.get(x, y));
      }
  }
  EXPECT_THROW(compose_upper_body_split(m, 0.0), Error);
  EXPECT_THROW(compose_upper_body_split(m, 1.0), Error);
}

TEST(Compositor, UpperBodyModeKeepsTheBackgroundLowerBody) {
  TempDir dir("compub");
  make_cards(dir.path(), 6, 8);
  const DatasetIndex idx = load_dataset(dir.path());
  const Compositor comp(idx, tautological_config());
  const CompositeRecipe r{idx.record(0).sample_id, idx.record(3).sample_id, RoiMode::upper_body,
                          idx.record(0).label};
  const SyntheticSample s = comp.compose(r);
  const PaddedSample bg = pad_oracle(idx.load_image(3), idx.load_mask(3));
  const BinaryMask lower = compose_upper_body_split(bg.mask, 0.5).second;
  int kept = 0;
  for (int y = 0; y < s.image.height(); ++y)
    for (int x = 0; x < s.image.width(); ++x)
      if (lower.get(x, y) && !s.hole.get(x, y) && !s.placed_mask.get(x, y)) {
        EXPECT_EQ(s.image.at(x, y), bg.image.at(x, y));
        ++kept;
      }
  EXPECT_GT(kept, 0);
  EXPECT_EQ(pixel_contract_violation(idx, s), "");
}

TEST(Compositor, LabelsProvenanceAndDeterminism) {
  TempDir dir("complab");
  make_cards(dir.path(), 5, 12);
  const DatasetIndex idx = load_dataset(dir.path());
  const PairingConfig cfg = tautological_config();
  const Compositor a(idx, cfg), b(idx, cfg);
  for (const auto& r : candidate_pairs(idx, cfg)) {
    const SyntheticSample x = a.compose(r, 4);
    const SyntheticSample y = b.compose(r, 4);
    EXPECT_EQ(x.label, idx.record(*idx.find(r.roi_source)).label);
    EXPECT_EQ(x.image, y.image);
    EXPECT_EQ(x.provenance, y.provenance);
    EXPECT_NE(x.provenance, a.compose(r, 5).provenance);
    EXPECT_EQ(x.image, compose(r, idx, cfg).image);
  }
}

TEST(Compositor, RecipeChecks) {
  TempDir dir("compinc");
  make_cards(dir.path(), 4, 13);
  const DatasetIndex idx = load_dataset(dir.path());
  PairingConfig reject_all;
  reject_all.t_s = 1e-9;  // literal size rule: nothing is below this ratio
  const Compositor comp(idx, reject_all);
  const auto& r0 = idx.record(0);
  const auto& r1 = idx.record(1);
  EXPECT_EQ(error_of([&] { comp.compose({r0.sample_id, r1.sample_id, RoiMode::full_body, r0.label}); }),
            ErrorCode::IncompatiblePair);
  EXPECT_EQ(error_of([&] { comp.compose({r0.sample_id, r0.sample_id, RoiMode::full_body, r0.label}); }),
            ErrorCode::IncompatiblePair);
  EXPECT_EQ(error_of([&] { comp.compose({"nope", r1.sample_id, RoiMode::full_body, r0.label}); }),
            ErrorCode::InvalidArgument);
  const Compositor ok(idx, tautological_config());
  EXPECT_EQ(error_of([&] { ok.compose({r0.sample_id, r1.sample_id, RoiMode::full_body, "wrong"}); }),
            ErrorCode::InvalidArgument);
}

TEST(Compositor, PlatesAreCachedPerDonorAndMode) {
  TempDir dir("compcache");
  make_cards(dir.path(), 3, 14);
  const DatasetIndex idx = load_dataset(dir.path());
  const Compositor comp(idx, tautological_config());
  EXPECT_EQ(comp.plate(1, RoiMode::full_body), comp.plate(1, RoiMode::full_body));
  EXPECT_NE(comp.plate(1, RoiMode::full_body), comp.plate(1, RoiMode::upper_body));
}

TEST(Compositor, FeatheringOnlyTouchesThePlacedRim) {
  std::mt19937_64 rng(36);
  const RasterImage ri = noise(rng, 24, 24), bi = noise(rng, 24, 24);
  const BinaryMask rm = rect_mask(24, 24, 4, 4, 19, 19);
  const BinaryMask bm = rect_mask(24, 24, 6, 6, 17, 17);
  ComposeOptions hard, soft;
  soft.feather_radius = 2;
  const BackgroundPlate plate = make_background_plate(bi, bm, RoiMode::full_body, hard);
  const PaddedSample roi = replicate_pad_to_square(ri, rm);
  const SyntheticSample h = compose_onto_plate(roi, plate, RoiMode::full_body, hard);
  const SyntheticSample f = compose_onto_plate(roi, plate, RoiMode::full_body, soft);
  EXPECT_EQ(h.placed_mask, f.placed_mask);
  for (int y = 0; y < 24; ++y)
    for (int x = 0; x < 24; ++x) {
      const bool interior = x >= 8 && x <= 15 && y >= 8 && y <= 15;
      if (!h.placed_mask.get(x, y) || interior) { EXPECT_EQ(h.image.at(x, y), f.image.at(x, y)); }
    }
  EXPECT_NE(h.image, f.image);
  ComposeOptions bad;
  bad.feather_radius = -1;
  EXPECT_THROW(bad.validate(), Error);
}

TEST(Compositor, FileNamesAndConfigHash) {
  const CompositeRecipe r{"a/b", "c", RoiMode::upper_body, "p"};
  EXPECT_EQ(synthetic_file_name(r), "a_b__in__c__upper_body.png");
  PairingConfig c1, c2;
  c2.t_i = 0.5;
  EXPECT_EQ(config_hash(c1, {}), config_hash(c1, {}));
  EXPECT_NE(config_hash(c1, {}), config_hash(c2, {}));
  EXPECT_EQ(config_hash(c1, {}).size(), 16u);
}

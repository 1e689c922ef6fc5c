// SPDX-License-Identifier: Apache-2.0

#include "rfaug/test_cards.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "json.hpp"
#include "rfaug/png_io.hpp"
#include "rfaug/random.hpp"

namespace rfaug {
namespace {

namespace fs = std::filesystem;

class Draws {
public:
  Draws(std::uint64_t seed, std::uint64_t key) : seed_(seed), key_(key) {}
  double unit() { return rng::to_unit(rng::counter_hash(seed_, key_, 0, n_++)); }
  int range(int lo, int hi) { return lo + static_cast<int>(unit() * (hi - lo + 1)); }
  std::uint8_t channel(int lo = 0, int hi = 255) { return static_cast<std::uint8_t>(range(lo, hi)); }
  Rgb color(int lo = 0, int hi = 255) { return {channel(lo, hi), channel(lo, hi), channel(lo, hi)}; }

private:
  std::uint64_t seed_;
  std::uint64_t key_;
  std::uint64_t n_ = 0;
};

void fill_rect(RasterImage& img, BinaryMask& mask, int x0, int y0, int x1, int y1, Rgb c) {
  x0 = std::max(x0, 0);
  y0 = std::max(y0, 0);
  x1 = std::min(x1, img.width() - 1);
  y1 = std::min(y1, img.height() - 1);
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      img.at(x, y) = c;
      mask.set(x, y, true);
    }
  }
}

void fill_ellipse(RasterImage& img, BinaryMask& mask, double cx, double cy, double rx,
                  double ry, Rgb c) {
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const double dx = (x - cx) / rx;
      const double dy = (y - cy) / ry;
      if (dx * dx + dy * dy <= 1.0) {
        img.at(x, y) = c;
        mask.set(x, y, true);
      }
    }
  }
}

}  // namespace

TestCard make_test_card(std::size_t i, const TestCardOptions& opts) {
  const std::size_t identity = i / static_cast<std::size_t>(std::max(1, opts.cards_per_identity));
  Draws card(opts.seed, 2 * i + 1);
  Draws who(opts.seed, 2 * identity + 1'000'000);

  const int h = opts.height;
  const int w = card.range(opts.min_width, opts.max_width);

  TestCard tc;
  tc.image = RasterImage(w, h);
  tc.mask = BinaryMask(w, h);

  // Two-tone horizontal stripes as the scene.
  const Rgb bg_a = card.color(20, 235);
  const Rgb bg_b = card.color(20, 235);
  const int period = card.range(6, 20);
  for (int y = 0; y < h; ++y) {
    const Rgb c = (y / period) % 2 ? bg_b : bg_a;
    for (int x = 0; x < w; ++x) tc.image.at(x, y) = c;
  }

  const bool child = who.unit() < 0.3;
  const bool female = who.unit() < 0.5;
  const Rgb skin = who.color(150, 230);
  const Rgb shirt = who.color(0, 255);
  const Rgb pants = who.color(0, 255);

  const std::string viewpoint = opts.viewpoints[static_cast<std::size_t>(
      card.range(0, static_cast<int>(opts.viewpoints.size()) - 1))];
  const bool side = viewpoint == "side";

  const double scale = child ? card.range(45, 60) / 100.0 : card.range(62, 92) / 100.0;
  const int ph = std::max(24, static_cast<int>(h * scale));
  const int top = card.range(1, h - ph - 1);
  const double cx = w / 2.0 + card.range(-w / 8, w / 8);

  const double head_r = ph * 0.09;
  const int torso_top = top + static_cast<int>(2 * head_r);
  const int torso_h = static_cast<int>(ph * 0.38);
  int torso_w = static_cast<int>(ph * card.range(20, 34) / 100.0);
  if (side) torso_w = static_cast<int>(torso_w * 0.65);
  torso_w = std::min(torso_w, w - 4);
  const int tx0 = static_cast<int>(cx - torso_w / 2.0);

  fill_ellipse(tc.image, tc.mask, cx, top + head_r, head_r, head_r, skin);
  fill_rect(tc.image, tc.mask, tx0, torso_top, tx0 + torso_w - 1, torso_top + torso_h - 1, shirt);

  if (!side && card.unit() < 0.7) {
    const int arm_w = std::max(2, torso_w / 5);
    const int arm_h = static_cast<int>(torso_h * card.range(70, 105) / 100.0);
    fill_rect(tc.image, tc.mask, tx0 - arm_w, torso_top + 1, tx0 - 1, torso_top + arm_h, shirt);
    fill_rect(tc.image, tc.mask, tx0 + torso_w, torso_top + 1, tx0 + torso_w + arm_w - 1,
              torso_top + arm_h, shirt);
  }

  const int legs_top = torso_top + torso_h;
  const int legs_bottom = top + ph - 1;
  const int leg_w = std::max(2, static_cast<int>(torso_w * 0.42));
  const int spread = side ? 0 : card.range(0, std::max(0, torso_w / 4));
  fill_rect(tc.image, tc.mask, tx0 - spread, legs_top, tx0 - spread + leg_w - 1, legs_bottom, pants);
  fill_rect(tc.image, tc.mask, tx0 + torso_w - leg_w + spread, legs_top, tx0 + torso_w - 1 + spread,
            legs_bottom, pants);
  if (female && card.unit() < 0.5) {
    // Skirt: widen the hip block.
    fill_rect(tc.image, tc.mask, tx0 - 2, legs_top, tx0 + torso_w + 1,
              legs_top + (legs_bottom - legs_top) / 3, pants);
  }

  char id[64];
  std::snprintf(id, sizeof id, "p%03zu_c%zu_f%zu", identity,
                i % static_cast<std::size_t>(std::max(1, opts.cards_per_identity)) + 1, i);
  char label[32];
  std::snprintf(label, sizeof label, "p%03zu", identity);
  tc.record.sample_id = id;
  tc.record.image_path = std::string("images/") + id + ".png";
  tc.record.mask_path = std::string("masks/") + id + ".png";
  tc.record.label = label;
  tc.record.viewpoint = viewpoint;
  tc.record.attributes = {{"age", child ? "child" : "adult"},
                          {"gender", female ? "female" : "male"}};
  return tc;
}

void write_test_cards(const fs::path& root, const TestCardOptions& opts) {
  fs::create_directories(root / "images");
  fs::create_directories(root / "masks");
  std::ofstream meta(root / "meta.jsonl", std::ios::binary | std::ios::trunc);
  if (!meta) throw Error(ErrorCode::IoFailure, (root / "meta.jsonl").string());
  const nlohmann::json header = {
      {"header", {{"viewpoints", opts.viewpoints}, {"attributes", {"age", "gender"}}}}};
  meta << header.dump() << '\n';
  for (int i = 0; i < opts.count; ++i) {
    const TestCard tc = make_test_card(static_cast<std::size_t>(i), opts);
    png::write_rgb(root / tc.record.image_path, tc.image);
    png::write_mask(root / tc.record.mask_path, tc.mask);
    const nlohmann::json row = {{"sample_id", tc.record.sample_id},
                                {"image", tc.record.image_path},
                                {"mask", tc.record.mask_path},
                                {"label", tc.record.label},
                                {"viewpoint", tc.record.viewpoint},
                                {"attributes", tc.record.attributes}};
    meta << row.dump() << '\n';
  }
  if (!meta) throw Error(ErrorCode::IoFailure, (root / "meta.jsonl").string());
}

}  // namespace rfaug

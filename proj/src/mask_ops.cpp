// SPDX-License-Identifier: Apache-2.0

#include "rfaug/mask_ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace rfaug {

std::int64_t mask_area(const BinaryMask& m) {
  std::int64_t n = 0;
  for (auto b : m.bits()) n += b;
  return n;
}

double mask_iou(const BinaryMask& a, const BinaryMask& b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::DimensionMismatch, "mask_iou: masks differ in size");
  }
  auto ab = a.bits();
  auto bb = b.bits();
  std::int64_t inter = 0;
  std::int64_t uni = 0;
  for (std::size_t i = 0; i < ab.size(); ++i) {
    inter += ab[i] & bb[i];
    uni += ab[i] | bb[i];
  }
  if (uni == 0) return 0.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

// Square dilation is separable: a horizontal run of length `size` followed
// by a vertical one. Each pass uses a sliding count so the cost does not
// depend on the kernel size.
BinaryMask dilate(const BinaryMask& m, const StructuringElement& k) {
  const int w = m.width();
  const int h = m.height();
  const int r = k.radius();
  if (r == 0) return m;

  std::vector<std::uint8_t> horiz(static_cast<std::size_t>(w) * h, 0);
  auto src = m.bits();
  std::vector<int> prefix(static_cast<std::size_t>(std::max(w, h)) + 1);

  for (int y = 0; y < h; ++y) {
    const std::uint8_t* row = src.data() + static_cast<std::size_t>(y) * w;
    prefix[0] = 0;
    for (int x = 0; x < w; ++x) prefix[x + 1] = prefix[x] + row[x];
    for (int x = 0; x < w; ++x) {
      const int lo = std::max(0, x - r);
      const int hi = std::min(w - 1, x + r);
      horiz[static_cast<std::size_t>(y) * w + x] = prefix[hi + 1] - prefix[lo] > 0;
    }
  }

  BinaryMask out(w, h);
  for (int x = 0; x < w; ++x) {
    prefix[0] = 0;
    for (int y = 0; y < h; ++y) {
      prefix[y + 1] = prefix[y] + horiz[static_cast<std::size_t>(y) * w + x];
    }
    for (int y = 0; y < h; ++y) {
      const int lo = std::max(0, y - r);
      const int hi = std::min(h - 1, y + r);
      out.set(x, y, prefix[hi + 1] - prefix[lo] > 0);
    }
  }
  return out;
}

BoundingBox mask_bbox(const BinaryMask& m) {
  int x0 = std::numeric_limits<int>::max();
  int y0 = std::numeric_limits<int>::max();
  int x1 = -1;
  int y1 = -1;
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) {
      if (!m.get(x, y)) continue;
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    }
  }
  if (x1 < 0) throw Error(ErrorCode::EmptyMask, "mask_bbox: mask has no set bits");
  return {x0, y0, x1, y1};
}

BinaryMask binarize_mask(const GrayImage& raw, std::uint8_t threshold) {
  BinaryMask out(raw.width(), raw.height());
  for (int y = 0; y < raw.height(); ++y) {
    for (int x = 0; x < raw.width(); ++x) out.set(x, y, raw.at(x, y) > threshold);
  }
  return out;
}

Letterbox letterbox_geometry(int bw, int bh, Size target) {
  if (bw < 1 || bh < 1 || target.width < 1 || target.height < 1) {
    throw Error(ErrorCode::InvalidBox, "letterbox: non-positive dimensions");
  }
  const std::int64_t tw = target.width;
  const std::int64_t th = target.height;
  std::int64_t sw = 0;
  std::int64_t sh = 0;
  // Integer rounding (half up) keeps the geometry exact on every platform.
  if (tw * bh <= th * bw) {
    sw = tw;
    sh = (2 * bh * tw + bw) / (2 * bw);
  } else {
    sh = th;
    sw = (2 * bw * th + bh) / (2 * bh);
  }
  sw = std::clamp<std::int64_t>(sw, 1, tw);
  sh = std::clamp<std::int64_t>(sh, 1, th);
  return {static_cast<int>((tw - sw) / 2), static_cast<int>((th - sh) / 2),
          static_cast<int>(sw), static_cast<int>(sh)};
}

namespace {

void check_box(const BoundingBox& box, Size src) {
  if (!box.valid_within(src)) {
    throw Error(ErrorCode::InvalidBox, "crop box outside source grid");
  }
}

std::uint8_t round_channel(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
}

}  // namespace

RasterImage crop_resize_preserve_aspect(const RasterImage& src,
                                        const BoundingBox& box, Size target) {
  check_box(box, src.size());
  const int bw = box.width();
  const int bh = box.height();
  const Letterbox lb = letterbox_geometry(bw, bh, target);
  RasterImage out(target.width, target.height, Rgb{0, 0, 0});

  // Half-pixel-centre bilinear sampling.
  struct Tap {
    int i0, i1;
    double f;
  };
  auto taps = [](int dst_len, int src_len) {
    std::vector<Tap> t(dst_len);
    for (int d = 0; d < dst_len; ++d) {
      double s = (d + 0.5) * static_cast<double>(src_len) / dst_len - 0.5;
      s = std::clamp(s, 0.0, static_cast<double>(src_len - 1));
      const int i0 = static_cast<int>(std::floor(s));
      t[d] = {i0, std::min(i0 + 1, src_len - 1), s - i0};
    }
    return t;
  };
  const auto tx = taps(lb.scaled_width, bw);
  const auto ty = taps(lb.scaled_height, bh);

  for (int dy = 0; dy < lb.scaled_height; ++dy) {
    const Tap& vy = ty[dy];
    for (int dx = 0; dx < lb.scaled_width; ++dx) {
      const Tap& vx = tx[dx];
      const Rgb& p00 = src.at(box.x0 + vx.i0, box.y0 + vy.i0);
      const Rgb& p01 = src.at(box.x0 + vx.i1, box.y0 + vy.i0);
      const Rgb& p10 = src.at(box.x0 + vx.i0, box.y0 + vy.i1);
      const Rgb& p11 = src.at(box.x0 + vx.i1, box.y0 + vy.i1);
      auto lerp2 = [&](std::uint8_t a, std::uint8_t b, std::uint8_t c, std::uint8_t d) {
        const double top = a + (b - a) * vx.f;
        const double bot = c + (d - c) * vx.f;
        return round_channel(top + (bot - top) * vy.f);
      };
      out.at(lb.offset_x + dx, lb.offset_y + dy) = {
          lerp2(p00.r, p01.r, p10.r, p11.r), lerp2(p00.g, p01.g, p10.g, p11.g),
          lerp2(p00.b, p01.b, p10.b, p11.b)};
    }
  }
  return out;
}

BinaryMask crop_resize_preserve_aspect(const BinaryMask& src,
                                       const BoundingBox& box, Size target) {
  check_box(box, src.size());
  const int bw = box.width();
  const int bh = box.height();
  const Letterbox lb = letterbox_geometry(bw, bh, target);
  BinaryMask out(target.width, target.height);

  // Nearest neighbour on pixel centres: floor((d + 0.5) * src / dst).
  auto nearest = [](int d, int src_len, int dst_len) {
    const std::int64_t s = (2 * static_cast<std::int64_t>(d) + 1) * src_len / (2 * dst_len);
    return static_cast<int>(std::min<std::int64_t>(s, src_len - 1));
  };
  std::vector<int> sx(lb.scaled_width);
  for (int dx = 0; dx < lb.scaled_width; ++dx) sx[dx] = nearest(dx, bw, lb.scaled_width);
  for (int dy = 0; dy < lb.scaled_height; ++dy) {
    const int y = box.y0 + nearest(dy, bh, lb.scaled_height);
    for (int dx = 0; dx < lb.scaled_width; ++dx) {
      out.set(lb.offset_x + dx, lb.offset_y + dy, src.get(box.x0 + sx[dx], y));
    }
  }
  return out;
}

BinaryMask normalize_shape(const BinaryMask& m, int canvas) {
  return crop_resize_preserve_aspect(m, mask_bbox(m), Size{canvas, canvas});
}

PaddedSample replicate_pad_to_square(const RasterImage& img, const BinaryMask& mask) {
  if (img.size() != mask.size()) {
    throw Error(ErrorCode::DimensionMismatch, "pad: image and mask sizes differ");
  }
  const int w = img.width();
  const int h = img.height();
  const int side = std::max(w, h);
  const int ox = (side - w) / 2;
  const int oy = (side - h) / 2;

  PaddedSample out{RasterImage(side, side), BinaryMask(side, side), ox, oy};
  for (int y = 0; y < side; ++y) {
    const int sy = std::clamp(y - oy, 0, h - 1);
    for (int x = 0; x < side; ++x) {
      const int sx = std::clamp(x - ox, 0, w - 1);
      out.image.at(x, y) = img.at(sx, sy);
    }
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) out.mask.set(x + ox, y + oy, mask.get(x, y));
  }
  return out;
}

}  // namespace rfaug

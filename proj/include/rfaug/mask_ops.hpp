// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

#include "rfaug/image.hpp"

namespace rfaug {

/// Square all-ones structuring element with an odd side length.
class StructuringElement {
public:
  explicit StructuringElement(int size) : size_(size) {
    if (size < 1 || size % 2 == 0) {
      throw Error(ErrorCode::InvalidArgument,
                  "structuring element size must be odd and >= 1");
    }
  }
  int size() const noexcept { return size_; }
  int radius() const noexcept { return (size_ - 1) / 2; }

private:
  int size_;
};

/// Inclusive pixel box.
struct BoundingBox {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;

  int width() const noexcept { return x1 - x0 + 1; }
  int height() const noexcept { return y1 - y0 + 1; }
  bool valid_within(Size grid) const noexcept {
    return x0 >= 0 && y0 >= 0 && x0 <= x1 && y0 <= y1 && x1 < grid.width &&
           y1 < grid.height;
  }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

/// Side length of the canvas both masks are letterboxed onto before the
/// shape IoU is taken.
inline constexpr int kShapeCanvas = 128;

std::int64_t mask_area(const BinaryMask& m);

/// |a & b| / |a | b|; 0 when both masks are empty.
double mask_iou(const BinaryMask& a, const BinaryMask& b);

/// Square dilation, neighbourhood cells outside the grid count as 0.
BinaryMask dilate(const BinaryMask& m, const StructuringElement& k);

/// Tightest box around the set bits. Throws EmptyMask.
BoundingBox mask_bbox(const BinaryMask& m);

BinaryMask binarize_mask(const GrayImage& raw, std::uint8_t threshold = 127);

/// Placement of a min-ratio scaled box inside a target canvas.
struct Letterbox {
  int offset_x = 0;
  int offset_y = 0;
  int scaled_width = 0;
  int scaled_height = 0;
};

Letterbox letterbox_geometry(int box_width, int box_height, Size target);

/// Crop to `box`, scale by min(target_w/box_w, target_h/box_h) and centre on
/// a target-sized canvas. Images are resampled bilinearly over a black
/// canvas, masks by nearest neighbour over a zero canvas.
RasterImage crop_resize_preserve_aspect(const RasterImage& src,
                                        const BoundingBox& box, Size target);
BinaryMask crop_resize_preserve_aspect(const BinaryMask& src,
                                       const BoundingBox& box, Size target);

/// Mask cropped to its own bbox and letterboxed on the shape canvas.
BinaryMask normalize_shape(const BinaryMask& m, int canvas = kShapeCanvas);

struct PaddedSample {
  RasterImage image;
  BinaryMask mask;
  int offset_x = 0;  ///< column of original (0,0) in the padded grid
  int offset_y = 0;
};

/// Pads to max(w,h) squared, content centred, borders replicate the nearest
/// edge row/column of the image; mask borders are 0.
PaddedSample replicate_pad_to_square(const RasterImage& img,
                                     const BinaryMask& mask);

}  // namespace rfaug

// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "rfaug/image.hpp"

namespace rfaug {

inline constexpr int kDefaultInpaintRadius = 5;

struct InpaintRequest {
  const RasterImage& image;
  const BinaryMask& hole;  ///< 1 = pixel to fill
  int radius = kDefaultInpaintRadius;
};

/// Fast-marching inpainting. Hole pixels are visited in increasing
/// arrival-time order of a front marching inward from the hole boundary
/// (ties broken by row-major index); each is set to the normalised average
/// of the non-hole pixels within `radius`, weighted by direction, distance
/// and level-set proximity. Pixels outside the hole are copied unchanged.
///
/// Throws FullMask when no pixel is known, DimensionMismatch when the hole
/// and image sizes differ and InvalidArgument when radius < 1.
RasterImage inpaint_fmm(const InpaintRequest& req);

}  // namespace rfaug

// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>

#include "rfaug/dataset.hpp"
#include "rfaug/inpaint.hpp"
#include "rfaug/mask_ops.hpp"
#include "rfaug/pairing.hpp"

namespace rfaug {

struct ComposeOptions {
  int dilation_size = 7;
  int inpaint_radius = kDefaultInpaintRadius;
  double split_fraction = 0.5;  ///< upper-body split, fraction of bbox height
  int feather_radius = 0;       ///< 0 = hard paste

  void validate() const;
  friend bool operator==(const ComposeOptions&, const ComposeOptions&) = default;
};

/// Canonical JSON text of everything that influences composite pixels.
std::string config_description(const PairingConfig& cfg, const ComposeOptions& opts);
/// FNV-1a of config_description().
std::string config_hash(const PairingConfig& cfg, const ComposeOptions& opts);

struct SyntheticSample {
  RasterImage image;
  std::string label;
  CompositeRecipe recipe;
  std::string provenance;
  BinaryMask placed_mask;  ///< output pixels copied from the ROI donor
  BinaryMask hole;         ///< dilated region inpainted on the background donor
  BoundingBox placement;   ///< scaled ROI box inside the plate
};

/// Splits at row y0 + floor(split_fraction * bbox_height): rows above go to
/// `upper`, the rest to `lower`. Throws EmptyMask.
std::pair<BinaryMask, BinaryMask> compose_upper_body_split(const BinaryMask& mask,
                                                           double split_fraction);

/// Background donor after padding and person removal. Independent of the
/// ROI donor, so it is shared between all composites over the same donor.
struct BackgroundPlate {
  PaddedSample padded;
  BinaryMask region;  ///< removed person region (upper part in upper-body mode)
  BinaryMask hole;    ///< region dilated
  BoundingBox anchor; ///< bbox of `region`; ROI is centred in it
  RasterImage plate;  ///< padded image with `hole` inpainted
};

BackgroundPlate make_background_plate(const RasterImage& image,
                                      const BinaryMask& mask, RoiMode mode,
                                      const ComposeOptions& opts);

/// Pastes the ROI of a padded donor into a plate. Exposed separately from
/// Compositor so it can be driven with in-memory images.
SyntheticSample compose_onto_plate(const PaddedSample& roi_donor,
                                   const BackgroundPlate& plate,
                                   RoiMode mode, const ComposeOptions& opts);

/// Runs the full synthesis for recipes over one dataset. Background plates
/// are cached per donor and mode; compose() is safe to call concurrently.
class Compositor {
public:
  Compositor(const DatasetIndex& idx, PairingConfig cfg, ComposeOptions opts = {},
             const PairingEngine* engine = nullptr);

  const std::string& config_hash() const noexcept { return config_hash_; }

  /// Throws IncompatiblePair, EmptyMask or CompositionOverflow.
  SyntheticSample compose(const CompositeRecipe& recipe, std::uint64_t seed = 0) const;

  std::shared_ptr<const BackgroundPlate> plate(std::size_t bg, RoiMode mode) const;

private:
  const DatasetIndex* idx_;
  PairingConfig cfg_;
  ComposeOptions opts_;
  const PairingEngine* engine_;
  std::string config_hash_;
  mutable std::mutex cache_mutex_;
  mutable std::map<std::pair<std::size_t, int>,
                   std::shared_ptr<const BackgroundPlate>> plates_;
};

/// Uncached single-shot variant.
SyntheticSample compose(const CompositeRecipe& recipe, const DatasetIndex& idx,
                        const PairingConfig& cfg, const ComposeOptions& opts = {},
                        std::uint64_t seed = 0);

std::string synthetic_file_name(const CompositeRecipe& recipe);

}  // namespace rfaug

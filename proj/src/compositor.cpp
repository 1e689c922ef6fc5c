// SPDX-License-Identifier: Apache-2.0

#include "rfaug/compositor.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"
#include "rfaug/hash.hpp"

namespace rfaug {

void ComposeOptions::validate() const {
  (void)StructuringElement{dilation_size};
  if (inpaint_radius < 1) throw Error(ErrorCode::InvalidArgument, "inpaint radius must be >= 1");
  if (!(split_fraction > 0.0 && split_fraction < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "split fraction must lie in (0,1)");
  }
  if (feather_radius < 0) throw Error(ErrorCode::InvalidArgument, "feather radius must be >= 0");
}

std::string config_description(const PairingConfig& cfg, const ComposeOptions& opts) {
  const nlohmann::json j = {
      {"t_s", cfg.t_s},
      {"t_i", cfg.t_i},
      {"size_rule", to_string(cfg.size_rule)},
      {"shape_rule", to_string(cfg.shape_rule)},
      {"require_same_viewpoint", cfg.require_same_viewpoint},
      {"match_attributes", cfg.match_attributes},
      {"dilation_size", opts.dilation_size},
      {"inpaint_radius", opts.inpaint_radius},
      {"split_fraction", opts.split_fraction},
      {"feather_radius", opts.feather_radius},
      {"shape_canvas", kShapeCanvas},
  };
  return j.dump();
}

std::string config_hash(const PairingConfig& cfg, const ComposeOptions& opts) {
  return Fnv1a{}.update(config_description(cfg, opts)).hex();
}

std::pair<BinaryMask, BinaryMask> compose_upper_body_split(const BinaryMask& mask,
                                                           double split_fraction) {
  if (!(split_fraction > 0.0 && split_fraction < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "split fraction must lie in (0,1)");
  }
  const BoundingBox box = mask_bbox(mask);
  // The epsilon keeps products like 0.99 * 100 from landing just below an
  // integer.
  const int split = box.y0 + static_cast<int>(std::floor(split_fraction * box.height() + 1e-9));
  BinaryMask upper(mask.width(), mask.height());
  BinaryMask lower(mask.width(), mask.height());
  for (int y = box.y0; y <= box.y1; ++y) {
    BinaryMask& dst = y < split ? upper : lower;
    for (int x = box.x0; x <= box.x1; ++x) {
      if (mask.get(x, y)) dst.set(x, y, true);
    }
  }
  return {std::move(upper), std::move(lower)};
}

namespace {

BinaryMask roi_region(const BinaryMask& mask, RoiMode mode, double split_fraction) {
  if (mode == RoiMode::full_body) return mask;
  BinaryMask upper = compose_upper_body_split(mask, split_fraction).first;
  if (mask_area(upper) == 0) throw Error(ErrorCode::EmptyMask, "upper-body region is empty");
  return upper;
}

// Chebyshev distance (1-based) from each set pixel to the nearest unset
// pixel, capped at cap + 1.
Grid<int> inner_distance(const BinaryMask& m, int cap) {
  Grid<int> d(m.width(), m.height(), 0);
  BinaryMask current = m;
  for (int level = 1; level <= cap + 1; ++level) {
    BinaryMask next(m.width(), m.height());
    for (int y = 0; y < m.height(); ++y) {
      for (int x = 0; x < m.width(); ++x) {
        if (!current.get(x, y)) continue;
        bool interior = true;
        for (int dy = -1; dy <= 1 && interior; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = x + dx;
            const int ny = y + dy;
            if (!current.contains(nx, ny) || !current.get(nx, ny)) {
              interior = false;
              break;
            }
          }
        }
        if (interior && level <= cap) {
          next.set(x, y, true);
        } else {
          d.at(x, y) = level;
        }
      }
    }
    current = std::move(next);
  }
  return d;
}

}  // namespace

BackgroundPlate make_background_plate(const RasterImage& image, const BinaryMask& mask,
                                      RoiMode mode, const ComposeOptions& opts) {
  BackgroundPlate p;
  p.padded = replicate_pad_to_square(image, mask);
  if (mask_area(p.padded.mask) == 0) {
    throw Error(ErrorCode::EmptyMask, "background donor mask is empty");
  }
  p.region = roi_region(p.padded.mask, mode, opts.split_fraction);
  p.hole = dilate(p.region, StructuringElement{opts.dilation_size});
  p.anchor = mask_bbox(p.region);
  p.plate = inpaint_fmm({p.padded.image, p.hole, opts.inpaint_radius});
  return p;
}

SyntheticSample compose_onto_plate(const PaddedSample& roi_donor, const BackgroundPlate& plate,
                                   RoiMode mode, const ComposeOptions& opts) {
  if (mask_area(roi_donor.mask) == 0) throw Error(ErrorCode::EmptyMask, "ROI donor mask is empty");
  const BinaryMask region = roi_region(roi_donor.mask, mode, opts.split_fraction);
  const BoundingBox roi_box = mask_bbox(region);
  const Size target{plate.anchor.width(), plate.anchor.height()};
  const Letterbox lb = letterbox_geometry(roi_box.width(), roi_box.height(), target);

  const RasterImage scaled = crop_resize_preserve_aspect(roi_donor.image, roi_box, target);
  const BinaryMask scaled_mask = crop_resize_preserve_aspect(region, roi_box, target);

  SyntheticSample out;
  out.placement = {plate.anchor.x0 + lb.offset_x, plate.anchor.y0 + lb.offset_y,
                   plate.anchor.x0 + lb.offset_x + lb.scaled_width - 1,
                   plate.anchor.y0 + lb.offset_y + lb.scaled_height - 1};
  if (!out.placement.valid_within(plate.plate.size())) {
    throw Error(ErrorCode::CompositionOverflow, "scaled ROI does not fit inside the plate");
  }

  out.image = plate.plate;
  out.hole = plate.hole;
  out.placed_mask = BinaryMask(plate.plate.width(), plate.plate.height());
  for (int y = 0; y < target.height; ++y) {
    for (int x = 0; x < target.width; ++x) {
      if (!scaled_mask.get(x, y)) continue;
      const int px = plate.anchor.x0 + x;
      const int py = plate.anchor.y0 + y;
      out.image.at(px, py) = scaled.at(x, y);
      out.placed_mask.set(px, py, true);
    }
  }

  if (opts.feather_radius > 0) {
    const int f = opts.feather_radius;
    const Grid<int> dist = inner_distance(out.placed_mask, f);
    const RasterImage& bg = plate.plate;
    for (int y = 0; y < out.image.height(); ++y) {
      for (int x = 0; x < out.image.width(); ++x) {
        const int d = dist.at(x, y);
        if (d == 0 || d > f) continue;
        const double a = static_cast<double>(d) / (f + 1);
        auto mix = [a](std::uint8_t fg, std::uint8_t b) {
          return static_cast<std::uint8_t>(std::floor(a * fg + (1.0 - a) * b + 0.5));
        };
        Rgb& px = out.image.at(x, y);
        const Rgb& under = bg.at(x, y);
        px = {mix(px.r, under.r), mix(px.g, under.g), mix(px.b, under.b)};
      }
    }
  }
  return out;
}

Compositor::Compositor(const DatasetIndex& idx, PairingConfig cfg, ComposeOptions opts,
                       const PairingEngine* engine)
    : idx_(&idx),
      cfg_(std::move(cfg)),
      opts_(opts),
      engine_(engine),
      config_hash_(rfaug::config_hash(cfg_, opts_)) {
  opts_.validate();
  cfg_.validate(&idx.header());
}

std::shared_ptr<const BackgroundPlate> Compositor::plate(std::size_t bg, RoiMode mode) const {
  const auto key = std::make_pair(bg, static_cast<int>(mode));
  {
    std::lock_guard lock(cache_mutex_);
    if (auto it = plates_.find(key); it != plates_.end()) return it->second;
  }
  // Built outside the lock; a concurrent duplicate build yields the same
  // pixels and the first insert wins.
  auto built = std::make_shared<const BackgroundPlate>(
      make_background_plate(idx_->load_image(bg), idx_->load_mask(bg), mode, opts_));
  std::lock_guard lock(cache_mutex_);
  return plates_.emplace(key, std::move(built)).first->second;
}

SyntheticSample Compositor::compose(const CompositeRecipe& recipe, std::uint64_t seed) const {
  const auto i = idx_->find(recipe.roi_source);
  const auto j = idx_->find(recipe.bg_source);
  if (!i || !j) {
    throw Error(ErrorCode::InvalidArgument,
                "recipe references unknown sample '" + (i ? recipe.bg_source : recipe.roi_source) + "'");
  }
  if (*i == *j) throw Error(ErrorCode::IncompatiblePair, "ROI and background donor are the same sample");
  if (recipe.label != idx_->record(*i).label) {
    throw Error(ErrorCode::InvalidArgument, "recipe label differs from the ROI donor's label");
  }
  if (idx_->stats(*i).area == 0 || idx_->stats(*j).area == 0) {
    throw Error(ErrorCode::EmptyMask, recipe.roi_source + " / " + recipe.bg_source + ": empty mask");
  }
  if (!idx_->usable_as_roi(*i)) {
    throw Error(ErrorCode::IncompatiblePair, recipe.roi_source + " cannot donate a ROI");
  }
  const bool ok = engine_ ? engine_->compatible(*i, *j)
                          : size_shape_compatible(*idx_, *i, *j, cfg_) &&
                                metadata_compatible(idx_->record(*i), idx_->record(*j), cfg_);
  if (!ok) {
    throw Error(ErrorCode::IncompatiblePair,
                recipe.roi_source + " -> " + recipe.bg_source + " fails the pairing constraints");
  }

  const auto bg = plate(*j, recipe.roi_mode);
  const PaddedSample roi = replicate_pad_to_square(idx_->load_image(*i), idx_->load_mask(*i));
  SyntheticSample s = compose_onto_plate(roi, *bg, recipe.roi_mode, opts_);
  s.label = idx_->record(*i).label;
  s.recipe = recipe;
  s.provenance = Fnv1a{}
                     .update(config_hash_)
                     .update(recipe.roi_source)
                     .update(recipe.bg_source)
                     .update(to_string(recipe.roi_mode))
                     .update(recipe.label)
                     .update(seed)
                     .hex();
  return s;
}

SyntheticSample compose(const CompositeRecipe& recipe, const DatasetIndex& idx,
                        const PairingConfig& cfg, const ComposeOptions& opts, std::uint64_t seed) {
  return Compositor(idx, cfg, opts).compose(recipe, seed);
}

std::string synthetic_file_name(const CompositeRecipe& recipe) {
  auto clean = [](std::string s) {
    std::replace(s.begin(), s.end(), '/', '_');
    std::replace(s.begin(), s.end(), '\\', '_');
    return s;
  };
  return clean(recipe.roi_source) + "__in__" + clean(recipe.bg_source) + "__" +
         std::string(to_string(recipe.roi_mode)) + ".png";
}

}  // namespace rfaug

// SPDX-License-Identifier: Apache-2.0

#include "rfaug/batch.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <map>
#include <optional>

#include "rfaug/compositor.hpp"
#include "rfaug/manifest.hpp"
#include "rfaug/png_io.hpp"
#include "rfaug/random.hpp"
#include "rfaug/sampler.hpp"
#include "rfaug/worker_pool.hpp"

namespace rfaug {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr std::uint64_t kPreviewStream = 0x7072657669657700ULL;

}  // namespace

json to_json(const RejectionStats& s) {
  return {{"considered", s.considered}, {"accepted", s.accepted},
          {"rejected", {{"size", s.size}, {"shape", s.shape},
                        {"viewpoint", s.viewpoint}, {"attributes", s.attributes}}},
          {"unusable", s.unusable}};
}

json to_json(const GenerateSummary& s) {
  return {{"pairs", to_json(s.pairs)},
          {"composites_written", s.composites_written},
          {"manifest", s.manifest.string()},
          {"config", s.config_sidecar.string()},
          {"config_hash", s.config_hash},
          {"seconds", s.seconds}};
}

fs::path config_sidecar_path(const fs::path& manifest) {
  fs::path p = manifest;
  return p.replace_filename(manifest.stem().string() + ".config.json");
}

GenerateSummary run_generate(const RunConfig& cfg, const std::atomic<bool>* cancel) {
  const auto start = std::chrono::steady_clock::now();
  cfg.validate();
  const DatasetIndex idx = load_dataset(cfg.root, {}, cfg.load);
  const PairingEngine engine(idx, cfg.pairing, cfg.workers);
  const PairEnumeration pairs = engine.enumerate(cfg.workers);
  const Compositor compositor(idx, cfg.pairing, cfg.compose, &engine);

  GenerateSummary summary;
  summary.pairs = pairs.stats;
  summary.manifest = cfg.manifest_path();
  summary.config_hash = compositor.config_hash();
  summary.config_sidecar = config_sidecar_path(summary.manifest);

  fs::create_directories(cfg.out);
  if (summary.manifest.has_parent_path()) fs::create_directories(summary.manifest.parent_path());
  // synthetic_path entries are relative to the manifest's directory.
  const fs::path manifest_dir = fs::absolute(summary.manifest).parent_path();
  const fs::path out_dir = fs::absolute(cfg.out);

  std::vector<fs::path> outputs(pairs.pairs.size());
  std::vector<char> written(pairs.pairs.size(), 0);
  std::optional<OrderedManifestWriter> writer;
  try {
    {
      std::ofstream side(summary.config_sidecar, std::ios::binary | std::ios::trunc);
      side << json{{"config_hash", summary.config_hash},
                   {"settings", json::parse(config_description(cfg.pairing, cfg.compose))},
                   {"roi_mode", to_string(cfg.policy.roi_mode)},
                   {"seed", cfg.policy.seed}}
                  .dump(2)
           << "\n";
      if (!side) throw Error(ErrorCode::IoFailure, "cannot write " + summary.config_sidecar.string());
    }
    writer.emplace(summary.manifest);
    parallel_for(
        pairs.pairs.size(), cfg.workers,
        [&](std::size_t k) {
          const auto [i, j] = pairs.pairs[k];
          const CompositeRecipe recipe = engine.make_recipe(i, j, cfg.policy.roi_mode);
          const SyntheticSample s = compositor.compose(recipe, cfg.policy.seed);
          outputs[k] = out_dir / synthetic_file_name(recipe);
          png::write_rgb(outputs[k], s.image);
          written[k] = 1;
          writer->submit(k, ManifestRecord{
                                outputs[k].lexically_relative(manifest_dir).generic_string(),
                                recipe.roi_source, recipe.bg_source, s.label, recipe.roi_mode,
                                idx.record(i).viewpoint, compositor.config_hash(),
                                s.image.size()});
        },
        cancel);
    summary.composites_written = writer->finish();
  } catch (...) {
    writer.reset();
    std::error_code ec;
    for (std::size_t k = 0; k < outputs.size(); ++k) {
      if (written[k]) fs::remove(outputs[k], ec);
    }
    fs::remove(summary.manifest, ec);
    fs::remove(summary.config_sidecar, ec);
    throw;
  }
  summary.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return summary;
}

RasterImage render_preview(const RunConfig& cfg, int count, int cell) {
  if (count < 1) throw Error(ErrorCode::InvalidArgument, "preview needs at least one row");
  if (cell < 1) throw Error(ErrorCode::InvalidArgument, "preview cell size must be >= 1");
  cfg.validate();
  const DatasetIndex idx = load_dataset(cfg.root, {}, cfg.load);
  const PairingEngine engine(idx, cfg.pairing, cfg.workers);
  const PairEnumeration pairs = engine.enumerate(cfg.workers);
  if (pairs.pairs.empty()) throw Error(ErrorCode::EmptyMask, "no compatible pair to preview");
  const Compositor compositor(idx, cfg.pairing, cfg.compose, &engine);

  RasterImage grid(2 * cell, count * cell);
  const Size cell_size{cell, cell};
  auto blit = [&](const RasterImage& src, int col, int row) {
    const BoundingBox all{0, 0, src.width() - 1, src.height() - 1};
    const RasterImage fit = crop_resize_preserve_aspect(src, all, cell_size);
    for (int y = 0; y < cell; ++y) {
      for (int x = 0; x < cell; ++x) grid.at(col * cell + x, row * cell + y) = fit.at(x, y);
    }
  };
  parallel_for(static_cast<std::size_t>(count), cfg.workers, [&](std::size_t r) {
    const std::uint64_t h = rng::counter_hash(cfg.policy.seed, kPreviewStream, r, 0);
    const auto [i, j] = pairs.pairs[rng::bounded(h, pairs.pairs.size())];
    const SyntheticSample s =
        compositor.compose(engine.make_recipe(i, j, cfg.policy.roi_mode), cfg.policy.seed);
    const PaddedSample donor = replicate_pad_to_square(idx.load_image(i), idx.load_mask(i));
    blit(donor.image, 0, static_cast<int>(r));
    blit(s.image, 1, static_cast<int>(r));
  });
  return grid;
}

json dataset_stats(const RunConfig& cfg, int epochs) {
  cfg.validate();
  const DatasetIndex idx = load_dataset(cfg.root, {}, cfg.load);
  json out;
  out["records"] = idx.size();

  std::map<std::string, int> viewpoints;
  std::map<std::string, int> labels;
  std::int64_t amin = 0;
  std::int64_t amax = 0;
  double asum = 0.0;
  int empty = 0;
  int nonempty = 0;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    ++viewpoints[idx.record(i).viewpoint];
    if (!idx.record(i).label.empty()) ++labels[idx.record(i).label];
    const auto a = idx.stats(i).area;
    if (a == 0) {
      ++empty;
      continue;
    }
    amin = nonempty ? std::min(amin, a) : a;
    amax = nonempty ? std::max(amax, a) : a;
    asum += static_cast<double>(a);
    ++nonempty;
  }
  out["identities"] = labels.size();
  out["empty_masks"] = empty;
  out["viewpoints"] = viewpoints;
  out["mask_area"] = {{"min", amin}, {"max", amax}, {"mean", nonempty ? asum / nonempty : 0.0}};

  const Augmenter aug(idx, cfg.pairing, cfg.policy, cfg.compose, cfg.workers);
  RejectionStats stats;
  std::size_t pmin = idx.size();
  std::size_t pmax = 0;
  std::size_t ptotal = 0;
  std::size_t pempty = 0;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    const auto n = aug.partners().of(i).size();
    pmin = std::min(pmin, n);
    pmax = std::max(pmax, n);
    ptotal += n;
    pempty += n == 0;
  }
  const PairingEngine engine(idx, cfg.pairing, cfg.workers);
  out["pairs"] = to_json(engine.enumerate(cfg.workers).stats);
  out["partners"] = {{"min", idx.size() ? pmin : 0},
                     {"max", pmax},
                     {"mean", idx.size() ? static_cast<double>(ptotal) / idx.size() : 0.0},
                     {"empty_lists", pempty}};

  std::uint64_t draws = 0;
  std::uint64_t drawn = 0;
  std::uint64_t augmented = 0;
  for (int e = 0; e < epochs; ++e) {
    for (std::size_t i = 0; i < idx.size(); ++i) {
      const AugmentDecision d = aug.decide(i, static_cast<std::uint64_t>(e));
      ++draws;
      drawn += d.drawn;
      augmented += d.augmented();
    }
  }
  out["sampling"] = {{"probability", cfg.policy.probability},
                     {"epochs", epochs},
                     {"draws", draws},
                     {"selected", drawn},
                     {"augmented", augmented},
                     {"augmented_fraction", draws ? static_cast<double>(augmented) / draws : 0.0},
                     {"passthrough_no_partner", drawn - augmented}};
  return out;
}

}  // namespace rfaug

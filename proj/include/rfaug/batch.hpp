// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <filesystem>
#include <string>

#include "json.hpp"
#include "rfaug/pairing.hpp"
#include "rfaug/run_config.hpp"

namespace rfaug {

struct GenerateSummary {
  RejectionStats pairs;
  std::size_t composites_written = 0;
  std::filesystem::path manifest;
  std::filesystem::path config_sidecar;  ///< <manifest stem>.config.json
  std::string config_hash;
  double seconds = 0.0;
};

nlohmann::json to_json(const RejectionStats& s);
nlohmann::json to_json(const GenerateSummary& s);

/// Full enumeration: every compatible ordered pair is composed on the worker
/// pool and written as PNG plus one manifest line. The settings behind the
/// config hash go to a sidecar next to the manifest. On any failure (or
/// cancellation) every file written by the run is removed before rethrowing.
std::filesystem::path config_sidecar_path(const std::filesystem::path& manifest);

GenerateSummary run_generate(const RunConfig& cfg,
                             const std::atomic<bool>* cancel = nullptr);

/// Grid with `count` rows of [ROI donor | composite], each cell a
/// `cell`-sized letterbox. Recipes are picked by counter-based draws from
/// the policy seed. Throws InvalidArgument for count < 1 and EmptyMask
/// when the dataset has no compatible pair.
RasterImage render_preview(const RunConfig& cfg, int count, int cell = 128);

/// Dataset, pairing and sampling statistics. `epochs` simulated epochs of
/// the on-the-fly policy give the observed augmentation rate.
nlohmann::json dataset_stats(const RunConfig& cfg, int epochs = 10);

}  // namespace rfaug

// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rfaug/compositor.hpp"
#include "rfaug/dataset.hpp"
#include "rfaug/pairing.hpp"
#include "rfaug/sampler.hpp"

namespace rfaug {

struct RunConfig {
  std::filesystem::path root;
  std::filesystem::path out;
  std::filesystem::path manifest;  ///< default <out>/manifest.jsonl
  PairingConfig pairing;
  AugmentationPolicy policy;
  ComposeOptions compose;
  LoadOptions load;
  int workers = 1;

  std::filesystem::path manifest_path() const;
  void validate() const;
};

/// Sparse overlay; unset fields leave the target untouched. The config file
/// and the command line both produce one of these.
struct RunConfigPatch {
  std::optional<std::string> root;
  std::optional<std::string> out;
  std::optional<std::string> manifest;
  std::optional<double> ts;
  std::optional<double> ti;
  std::optional<ComparisonRule> size_rule;
  std::optional<ComparisonRule> shape_rule;
  std::optional<RoiMode> roi;
  std::optional<double> split_fraction;
  std::optional<double> probability;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<std::vector<std::string>> match_attr;
  std::optional<bool> same_viewpoint;
  std::optional<bool> allow_unlabeled;
};

/// Parses the JSON config file schema (same keys as the long flags, with
/// '-' written as '_'). Throws ParseFailure.
RunConfigPatch parse_config_json(std::string_view text);
RunConfigPatch read_config_file(const std::filesystem::path& path);

void apply(RunConfig& cfg, const RunConfigPatch& patch);

/// Built-in defaults, with RFAUG_WORKERS (if set) as the default worker count.
RunConfig default_run_config();

/// defaults < config file < flags.
RunConfig resolve_run_config(const std::optional<RunConfigPatch>& file,
                             const RunConfigPatch& flags);

/// Augmentation presets matching the ablation grid: ROI mode and probability.
struct Preset {
  std::string_view name;
  RoiMode roi;
  double probability;
};

std::span<const Preset> presets() noexcept;
std::optional<Preset> find_preset(std::string_view name);

bool parse_switch(std::string_view s);  ///< on/off, true/false, 1/0

}  // namespace rfaug

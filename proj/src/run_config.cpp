// SPDX-License-Identifier: Apache-2.0

#include "rfaug/run_config.hpp"

#include <array>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace rfaug {
namespace {

using nlohmann::json;

constexpr std::array<Preset, 7> kPresets{{
    {"upper-body-0.1", RoiMode::upper_body, 0.1},
    {"upper-body-0.3", RoiMode::upper_body, 0.3},
    {"upper-body-0.5", RoiMode::upper_body, 0.5},
    {"upper-body-0.7", RoiMode::upper_body, 0.7},
    {"upper-body-0.9", RoiMode::upper_body, 0.9},
    {"full-body-0.3", RoiMode::full_body, 0.3},
    {"full-body-0.5", RoiMode::full_body, 0.5},
}};

bool switch_value(const json& v) {
  if (v.is_boolean()) return v.get<bool>();
  if (v.is_string()) return parse_switch(v.get<std::string>());
  throw Error(ErrorCode::ParseFailure, "expected on/off");
}

std::optional<int> env_workers() {
  const char* s = std::getenv("RFAUG_WORKERS");
  if (!s || !*s) return std::nullopt;
  int v = 0;
  const auto [p, ec] = std::from_chars(s, s + std::char_traits<char>::length(s), v);
  if (ec != std::errc{} || *p != '\0' || v < 1) {
    throw Error(ErrorCode::InvalidArgument, "RFAUG_WORKERS must be a positive integer");
  }
  return v;
}

}  // namespace

std::filesystem::path RunConfig::manifest_path() const {
  return manifest.empty() ? out / "manifest.jsonl" : manifest;
}

void RunConfig::validate() const {
  if (workers < 1) throw Error(ErrorCode::InvalidArgument, "worker count must be >= 1");
  pairing.validate();
  policy.validate();
  compose.validate();
}

bool parse_switch(std::string_view s) {
  if (s == "on" || s == "true" || s == "1") return true;
  if (s == "off" || s == "false" || s == "0") return false;
  throw Error(ErrorCode::InvalidArgument, "expected on/off, got '" + std::string(s) + "'");
}

std::span<const Preset> presets() noexcept { return kPresets; }

std::optional<Preset> find_preset(std::string_view name) {
  for (const Preset& p : kPresets) {
    if (p.name == name) return p;
  }
  return std::nullopt;
}

RunConfigPatch parse_config_json(std::string_view text) {
  RunConfigPatch p;
  try {
    const json j = json::parse(text);
    if (!j.is_object()) throw Error(ErrorCode::ParseFailure, "config must be a JSON object");
    for (const auto& [key, v] : j.items()) {
      if (key == "root") p.root = v.get<std::string>();
      else if (key == "out") p.out = v.get<std::string>();
      else if (key == "manifest") p.manifest = v.get<std::string>();
      else if (key == "ts") p.ts = v.get<double>();
      else if (key == "ti") p.ti = v.get<double>();
      else if (key == "size_rule") p.size_rule = parse_rule(v.get<std::string>());
      else if (key == "shape_rule") p.shape_rule = parse_rule(v.get<std::string>());
      else if (key == "roi") p.roi = parse_roi_mode(v.get<std::string>());
      else if (key == "split_fraction") p.split_fraction = v.get<double>();
      else if (key == "probability") p.probability = v.get<double>();
      else if (key == "seed") p.seed = v.get<std::uint64_t>();
      else if (key == "workers") p.workers = v.get<int>();
      else if (key == "match_attr") {
        p.match_attr = v.is_string() ? std::vector<std::string>{v.get<std::string>()}
                                     : v.get<std::vector<std::string>>();
      } else if (key == "same_viewpoint") p.same_viewpoint = switch_value(v);
      else if (key == "allow_unlabeled") p.allow_unlabeled = switch_value(v);
      else if (key == "preset") {
        const auto preset = find_preset(v.get<std::string>());
        if (!preset) throw Error(ErrorCode::ParseFailure, "unknown preset '" + v.get<std::string>() + "'");
        if (!j.contains("roi")) p.roi = preset->roi;
        if (!j.contains("probability")) p.probability = preset->probability;
      } else {
        throw Error(ErrorCode::ParseFailure, "unknown config key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseFailure, e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ParseFailure) throw;
    throw Error(ErrorCode::ParseFailure, e.what());
  }
  return p;
}

RunConfigPatch read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MissingFile, path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_json(ss.str());
}

void apply(RunConfig& cfg, const RunConfigPatch& p) {
  if (p.root) cfg.root = *p.root;
  if (p.out) cfg.out = *p.out;
  if (p.manifest) cfg.manifest = *p.manifest;
  if (p.ts) cfg.pairing.t_s = *p.ts;
  if (p.ti) cfg.pairing.t_i = *p.ti;
  if (p.size_rule) cfg.pairing.size_rule = *p.size_rule;
  if (p.shape_rule) cfg.pairing.shape_rule = *p.shape_rule;
  if (p.roi) cfg.policy.roi_mode = *p.roi;
  if (p.split_fraction) cfg.compose.split_fraction = *p.split_fraction;
  if (p.probability) cfg.policy.probability = *p.probability;
  if (p.seed) cfg.policy.seed = *p.seed;
  if (p.workers) cfg.workers = *p.workers;
  if (p.match_attr) cfg.pairing.match_attributes = *p.match_attr;
  if (p.same_viewpoint) cfg.pairing.require_same_viewpoint = *p.same_viewpoint;
  if (p.allow_unlabeled) cfg.load.allow_unlabeled_backgrounds = *p.allow_unlabeled;
}

RunConfig default_run_config() {
  RunConfig cfg;
  cfg.pairing.t_s = 0.8;
  cfg.pairing.t_i = 0.7;
  cfg.policy.probability = 0.3;
  const auto hw = static_cast<int>(std::thread::hardware_concurrency());
  cfg.workers = env_workers().value_or(hw > 0 ? hw : 1);
  return cfg;
}

RunConfig resolve_run_config(const std::optional<RunConfigPatch>& file,
                             const RunConfigPatch& flags) {
  RunConfig cfg = default_run_config();
  if (file) apply(cfg, *file);
  apply(cfg, flags);
  cfg.validate();
  return cfg;
}

}  // namespace rfaug

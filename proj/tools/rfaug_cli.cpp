// SPDX-License-Identifier: Apache-2.0
//
// rfaug: validate datasets, generate receptive-field composites, render
// preview grids and print statistics.

#include <atomic>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"
#include "rfaug/batch.hpp"
#include "rfaug/hash.hpp"
#include "rfaug/png_io.hpp"
#include "rfaug/run_config.hpp"
#include "rfaug/sampler.hpp"
#include "rfaug/session.hpp"
#include "rfaug/test_cards.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitData = 1;
constexpr int kExitUsage = 2;

std::atomic<bool> g_cancel{false};

extern "C" void on_sigint(int) { g_cancel.store(true); }

int exit_code_for(rfaug::ErrorCode code) {
  using rfaug::ErrorCode;
  switch (code) {
    case ErrorCode::InvalidArgument:
    case ErrorCode::IoFailure:
    case ErrorCode::ParseFailure:
    case ErrorCode::Cancelled:
    case ErrorCode::ClosedHandle:
    case ErrorCode::IndexOutOfRange:
      return kExitUsage;
    default:
      return kExitData;
  }
}

int report_error(const rfaug::Error& e, int status) {
  json j = {{"ok", false},
            {"error", {{"code", rfaug::to_string(e.code())}, {"message", e.what()}}}};
  std::cout << j.dump(2) << std::endl;
  return status;
}

/// Flags shared by every dataset command. Only flags actually given end up
/// in the patch, so they override the config file.
struct CommonFlags {
  std::string config;
  std::string root, out, manifest, size_rule, shape_rule, roi, same_viewpoint, preset;
  double ts = 0, ti = 0, split_fraction = 0, probability = 0;
  std::uint64_t seed = 0;
  int workers = 0;
  std::vector<std::string> match_attr;
  bool allow_unlabeled = false;

  std::map<std::string, CLI::Option*> opts;

  void attach(CLI::App* app) {
    opts["config"] = app->add_option("--config", config, "JSON run configuration");
    opts["root"] = app->add_option("--root", root, "dataset root (images/, masks/, meta.jsonl)");
    opts["out"] = app->add_option("--out", out, "output directory");
    opts["manifest"] = app->add_option("--manifest", manifest, "manifest path (default <out>/manifest.jsonl)");
    opts["ts"] = app->add_option("--ts", ts, "size-ratio threshold");
    opts["ti"] = app->add_option("--ti", ti, "shape-IoU threshold");
    opts["size_rule"] = app->add_option("--size-rule", size_rule, "as-written | similarity")
                            ->check(CLI::IsMember({"as-written", "as_written", "similarity"}));
    opts["shape_rule"] = app->add_option("--shape-rule", shape_rule, "as-written | similarity")
                             ->check(CLI::IsMember({"as-written", "as_written", "similarity"}));
    opts["roi"] = app->add_option("--roi", roi, "full-body | upper-body")
                      ->check(CLI::IsMember({"full-body", "upper-body", "full_body", "upper_body"}));
    opts["split_fraction"] = app->add_option("--split-fraction", split_fraction,
                                             "upper-body split as a fraction of mask bbox height");
    opts["probability"] = app->add_option("--probability", probability, "augmentation probability");
    opts["seed"] = app->add_option("--seed", seed, "random seed");
    opts["workers"] = app->add_option("--workers", workers, "worker threads");
    opts["match_attr"] = app->add_option("--match-attr", match_attr, "attribute that must match (repeatable)")
                             ->take_all();
    opts["same_viewpoint"] = app->add_option("--same-viewpoint", same_viewpoint, "on | off")
                                 ->check(CLI::IsMember({"on", "off"}));
    opts["preset"] = app->add_option("--preset", preset, "ablation preset, e.g. full-body-0.3");
    opts["allow_unlabeled"] = app->add_flag("--allow-unlabeled", allow_unlabeled,
                                            "accept label-less records as background donors");
  }

  bool given(const char* name) const { return opts.at(name)->count() > 0; }

  rfaug::RunConfigPatch patch() const {
    rfaug::RunConfigPatch p;
    if (given("preset")) {
      const auto pr = rfaug::find_preset(preset);
      if (!pr) throw rfaug::Error(rfaug::ErrorCode::InvalidArgument, "unknown preset '" + preset + "'");
      p.roi = pr->roi;
      p.probability = pr->probability;
    }
    if (given("root")) p.root = root;
    if (given("out")) p.out = out;
    if (given("manifest")) p.manifest = manifest;
    if (given("ts")) p.ts = ts;
    if (given("ti")) p.ti = ti;
    if (given("size_rule")) p.size_rule = rfaug::parse_rule(size_rule);
    if (given("shape_rule")) p.shape_rule = rfaug::parse_rule(shape_rule);
    if (given("roi")) p.roi = rfaug::parse_roi_mode(roi);
    if (given("split_fraction")) p.split_fraction = split_fraction;
    if (given("probability")) p.probability = probability;
    if (given("seed")) p.seed = seed;
    if (given("workers")) p.workers = workers;
    if (given("match_attr")) p.match_attr = match_attr;
    if (given("same_viewpoint")) p.same_viewpoint = rfaug::parse_switch(same_viewpoint);
    if (allow_unlabeled) p.allow_unlabeled = true;
    return p;
  }

  rfaug::RunConfig resolve() const {
    std::optional<rfaug::RunConfigPatch> file;
    if (!config.empty()) file = rfaug::read_config_file(config);
    rfaug::RunConfig cfg = rfaug::resolve_run_config(file, patch());
    if (cfg.root.empty()) throw rfaug::Error(rfaug::ErrorCode::InvalidArgument, "--root is required");
    return cfg;
  }
};

// A missing metadata file is a usage problem, a file missing from the
// dataset is a data problem.
void require_metadata(const rfaug::RunConfig& cfg) {
  std::error_code ec;
  if (!fs::is_regular_file(cfg.root / "meta.jsonl", ec)) {
    throw rfaug::Error(rfaug::ErrorCode::InvalidArgument,
                       "no meta.jsonl under " + cfg.root.string());
  }
}

int cmd_validate(const CommonFlags& flags) {
  const rfaug::RunConfig cfg = flags.resolve();
  require_metadata(cfg);
  const rfaug::ValidationReport report = rfaug::validate_dataset(cfg.root, {}, cfg.load);
  json issues = json::array();
  for (const auto& i : report.issues) {
    issues.push_back({{"line", i.line}, {"sample_id", i.sample_id}, {"kind", i.kind},
                      {"message", i.message}});
  }
  std::cout << json{{"ok", report.clean()}, {"records", report.records}, {"issues", issues}}.dump(2)
            << std::endl;
  return report.clean() ? kExitOk : kExitData;
}

int cmd_generate(const CommonFlags& flags) {
  rfaug::RunConfig cfg = flags.resolve();
  if (cfg.out.empty()) throw rfaug::Error(rfaug::ErrorCode::InvalidArgument, "--out is required");
  require_metadata(cfg);
  std::signal(SIGINT, on_sigint);
  const rfaug::GenerateSummary s = rfaug::run_generate(cfg, &g_cancel);
  json j = rfaug::to_json(s);
  j["ok"] = true;
  std::cout << j.dump(2) << std::endl;
  return kExitOk;
}

int cmd_preview(const CommonFlags& flags, int count, int cell, const std::string& grid_path) {
  rfaug::RunConfig cfg = flags.resolve();
  if (count < 1) throw rfaug::Error(rfaug::ErrorCode::InvalidArgument, "--count must be >= 1");
  require_metadata(cfg);
  fs::path path = grid_path;
  if (path.empty()) {
    if (cfg.out.empty()) throw rfaug::Error(rfaug::ErrorCode::InvalidArgument, "--out or --grid is required");
    fs::create_directories(cfg.out);
    path = cfg.out / "preview.png";
  }
  const rfaug::RasterImage grid = rfaug::render_preview(cfg, count, cell);
  rfaug::png::write_rgb(path, grid);
  std::cout << json{{"ok", true}, {"grid", path.string()}, {"rows", count},
                    {"width", grid.width()}, {"height", grid.height()}}
                   .dump(2)
            << std::endl;
  return kExitOk;
}

int cmd_stats(const CommonFlags& flags, int epochs) {
  const rfaug::RunConfig cfg = flags.resolve();
  require_metadata(cfg);
  json j = rfaug::dataset_stats(cfg, epochs);
  j["ok"] = true;
  std::cout << j.dump(2) << std::endl;
  return kExitOk;
}

int cmd_augment(const CommonFlags& flags, std::size_t index, std::uint64_t epoch,
                const std::string& png_path, const std::string& raw_path) {
  const rfaug::RunConfig cfg = flags.resolve();
  require_metadata(cfg);
  rfaug::AugmentSession session(cfg);
  const rfaug::AugmentedBuffer b = session.augment(index, epoch);
  if (!raw_path.empty()) {
    std::ofstream os(raw_path, std::ios::binary | std::ios::trunc);
    os.write(reinterpret_cast<const char*>(b.rgb.data()), static_cast<std::streamsize>(b.rgb.size()));
    if (!os) throw rfaug::Error(rfaug::ErrorCode::IoFailure, raw_path);
  }
  if (!png_path.empty()) {
    std::vector<rfaug::Rgb> px(b.rgb.size() / 3);
    std::memcpy(px.data(), b.rgb.data(), b.rgb.size());
    rfaug::png::write_rgb(png_path, rfaug::RasterImage(b.width, b.height, std::move(px)));
  }
  const std::string digest =
      rfaug::Fnv1a{}.update(std::string_view(reinterpret_cast<const char*>(b.rgb.data()), b.rgb.size())).hex();
  std::cout << json{{"ok", true},         {"index", index},       {"epoch", epoch},
                    {"label", b.label},   {"augmented", b.augmented},
                    {"width", b.width},   {"height", b.height},   {"fnv1a", digest}}
                   .dump(2)
            << std::endl;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Receptive-field data augmentation by foreground/background swapping"};
  app.require_subcommand(1);

  CommonFlags validate_flags, generate_flags, preview_flags, stats_flags, augment_flags;
  auto* validate = app.add_subcommand("validate", "check a dataset and report per-record problems");
  validate_flags.attach(validate);
  auto* generate = app.add_subcommand("generate", "compose every compatible pair to PNG + manifest");
  generate_flags.attach(generate);

  auto* preview = app.add_subcommand("preview", "render a grid of donors and composites");
  preview_flags.attach(preview);
  int count = 4;
  int cell = 128;
  std::string grid_path;
  preview->add_option("--count", count, "number of rows");
  preview->add_option("--cell", cell, "cell side in pixels");
  preview->add_option("--grid", grid_path, "output PNG (default <out>/preview.png)");

  auto* stats = app.add_subcommand("stats", "dataset, pairing and sampling statistics");
  stats_flags.attach(stats);
  int epochs = 10;
  stats->add_option("--epochs", epochs, "simulated epochs for the sampling rate");

  auto* augment = app.add_subcommand("augment", "run the on-the-fly policy for one (index, epoch)");
  augment_flags.attach(augment);
  std::size_t index = 0;
  std::uint64_t epoch = 0;
  std::string png_out, raw_out;
  augment->add_option("--index", index, "sample index")->required();
  augment->add_option("--epoch", epoch, "epoch");
  augment->add_option("--png", png_out, "write the result as PNG");
  augment->add_option("--raw", raw_out, "write the result as raw row-major RGB bytes");

  auto* cards = app.add_subcommand("make-testcards", "write the procedural test-card dataset");
  std::string cards_root;
  rfaug::TestCardOptions card_opts;
  cards->add_option("--root", cards_root, "output dataset root")->required();
  cards->add_option("--count", card_opts.count, "number of cards");
  cards->add_option("--seed", card_opts.seed, "generator seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*validate) return cmd_validate(validate_flags);
    if (*generate) return cmd_generate(generate_flags);
    if (*preview) return cmd_preview(preview_flags, count, cell, grid_path);
    if (*stats) return cmd_stats(stats_flags, epochs);
    if (*augment) return cmd_augment(augment_flags, index, epoch, png_out, raw_out);
    if (*cards) {
      rfaug::write_test_cards(cards_root, card_opts);
      std::cout << json{{"ok", true}, {"root", cards_root}, {"count", card_opts.count}}.dump(2)
                << std::endl;
      return kExitOk;
    }
  } catch (const rfaug::Error& e) {
    return report_error(e, exit_code_for(e.code()));
  } catch (const std::exception& e) {
    return report_error(rfaug::Error(rfaug::ErrorCode::IoFailure, e.what()), kExitUsage);
  }
  return kExitUsage;
}

// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cstdlib>

#include "rfaug/run_config.hpp"
#include "test_util.hpp"

using namespace rfaug;

TEST(RunConfig, DefaultsMatchTheReferenceSetup) {
  ::unsetenv("RFAUG_WORKERS");
  const RunConfig c = default_run_config();
  EXPECT_DOUBLE_EQ(c.pairing.t_s, 0.8);
  EXPECT_DOUBLE_EQ(c.pairing.t_i, 0.7);
  EXPECT_EQ(c.pairing.size_rule, ComparisonRule::as_written);
  EXPECT_EQ(c.compose.dilation_size, 7);
  EXPECT_DOUBLE_EQ(c.policy.probability, 0.3);
  EXPECT_GE(c.workers, 1);
  RunConfig o;
  o.out = "o";
  EXPECT_EQ(o.manifest_path(), std::filesystem::path("o/manifest.jsonl"));
  o.manifest = "m.jsonl";
  EXPECT_EQ(o.manifest_path(), std::filesystem::path("m.jsonl"));
}

TEST(RunConfig, FlagsOverrideFileOverrideDefaults) {
  const RunConfigPatch file = parse_config_json(
      R"({"ts":0.5,"ti":0.4,"seed":9,"roi":"upper-body","match_attr":["age"],"same_viewpoint":"off"})");
  RunConfigPatch flags;
  flags.ti = 0.2;
  flags.workers = 3;
  const RunConfig c = resolve_run_config(file, flags);
  EXPECT_DOUBLE_EQ(c.pairing.t_s, 0.5);
  EXPECT_DOUBLE_EQ(c.pairing.t_i, 0.2);
  EXPECT_EQ(c.policy.seed, 9u);
  EXPECT_EQ(c.policy.roi_mode, RoiMode::upper_body);
  EXPECT_EQ(c.pairing.match_attributes, std::vector<std::string>{"age"});
  EXPECT_FALSE(c.pairing.require_same_viewpoint);
  EXPECT_EQ(c.workers, 3);
  EXPECT_DOUBLE_EQ(c.policy.probability, 0.3);
}

TEST(RunConfig, PresetsAndExplicitKeys) {
  EXPECT_EQ(presets().size(), 7u);
  const auto p = find_preset("upper-body-0.7");
  ASSERT_TRUE(p);
  EXPECT_EQ(p->roi, RoiMode::upper_body);
  EXPECT_DOUBLE_EQ(p->probability, 0.7);
  EXPECT_FALSE(find_preset("upper-body-0.2"));

  const RunConfig a = resolve_run_config(parse_config_json(R"({"preset":"full-body-0.5"})"), {});
  EXPECT_EQ(a.policy.roi_mode, RoiMode::full_body);
  EXPECT_DOUBLE_EQ(a.policy.probability, 0.5);
  const RunConfig b =
      resolve_run_config(parse_config_json(R"({"preset":"full-body-0.5","probability":0.9})"), {});
  EXPECT_DOUBLE_EQ(b.policy.probability, 0.9);
}

TEST(RunConfig, RejectsBadInput) {
  EXPECT_THROW(parse_config_json(R"({"tS":0.5})"), Error);
  EXPECT_THROW(parse_config_json(R"({"preset":"nope"})"), Error);
  EXPECT_THROW(parse_config_json("[1,2]"), Error);
  EXPECT_THROW(parse_config_json("{"), Error);
  EXPECT_THROW(parse_config_json(R"({"ts":"high"})"), Error);
  RunConfigPatch bad;
  bad.probability = 1.2;
  EXPECT_THROW(resolve_run_config(std::nullopt, bad).validate(), Error);
  EXPECT_TRUE(parse_switch("on"));
  EXPECT_FALSE(parse_switch("0"));
  EXPECT_THROW(parse_switch("maybe"), Error);
}

TEST(RunConfig, WorkerEnvironmentVariable) {
  ::setenv("RFAUG_WORKERS", "5", 1);
  EXPECT_EQ(default_run_config().workers, 5);
  ::setenv("RFAUG_WORKERS", "zero", 1);
  EXPECT_THROW(default_run_config(), Error);
  ::unsetenv("RFAUG_WORKERS");
}

TEST(RunConfig, ReadsConfigFiles) {
  rfaug::testing::TempDir dir("cfg");
  { std::ofstream(dir.path() / "c.json") << R"({"root":"data","probability":0.1})"; }
  const RunConfigPatch p = read_config_file(dir.path() / "c.json");
  EXPECT_EQ(*p.root, "data");
  EXPECT_DOUBLE_EQ(*p.probability, 0.1);
  EXPECT_THROW(read_config_file(dir.path() / "missing.json"), Error);
}

#include "tfsmell/config.hpp"
#include "tfsmell/digest.hpp"
#include "tfsmell/hcl/parser.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <json.hpp>

using namespace tfsmell;
using tfsmell::testing::fixtures;
using tfsmell::testing::read_file;

TEST(Digest, KnownVectors) {
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  // `git hash-object` of an empty file and of "hello\n".
  EXPECT_EQ(git_blob_sha(""), "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
  EXPECT_EQ(git_blob_sha("hello\n"), "ce013625030ba8dba906f756967f9e9ca394464a");
}

TEST(Config, EmptyObjectGivesDefaults) {
  auto cfg = parse_detector_config("{}");
  EXPECT_EQ(to_json(cfg), to_json(DetectorConfig::defaults()));
  EXPECT_EQ(cfg.ss7_max_resources_per_file, 10);
  EXPECT_EQ(cfg.ss4_retention_max_days, 90);
}

TEST(Config, CanonicalJsonIsSortedAndStable) {
  auto text = to_json(DetectorConfig::defaults());
  auto doc = nlohmann::json::parse(text);
  std::string prev;
  for (const auto& [key, value] : doc.items()) {
    EXPECT_LT(prev, key);
    prev = key;
  }
  EXPECT_EQ(text.find('\n'), std::string::npos);
  // Re-reading the canonical form gives the same config.
  EXPECT_EQ(to_json(parse_detector_config(text)), text);
}

TEST(Config, DigestIsSha256OfCanonicalJson) {
  auto cfg = DetectorConfig::defaults();
  EXPECT_EQ(config_digest(cfg), sha256_hex(to_json(cfg)));
  EXPECT_EQ(config_digest(cfg).size(), 64u);
  // Key order and whitespace in the source do not matter.
  auto a = parse_detector_config(R"({"ss7_max_resources_per_file": 5, "ss4_retention_max_days": 30})");
  auto b = parse_detector_config("{\n  \"ss4_retention_max_days\":30,\"ss7_max_resources_per_file\":5}");
  EXPECT_EQ(config_digest(a), config_digest(b));
  EXPECT_NE(config_digest(a), config_digest(cfg));
}

TEST(Config, OverridesOnlyNamedFields) {
  auto cfg = parse_detector_config(R"({
    "ss2_compute_types": ["custom_vm"],
    "ss5_scan_comments": true,
    "ss4_log_retention_attrs": {"custom_logs": "keep_days"}
  })");
  EXPECT_EQ(cfg.ss2_compute_types, (std::set<std::string>{"custom_vm"}));
  EXPECT_TRUE(cfg.ss5_scan_comments);
  EXPECT_EQ(cfg.ss4_log_retention_attrs.size(), 1u);
  EXPECT_EQ(cfg.ss1_large_sizes, DetectorConfig::defaults().ss1_large_sizes);
}

TEST(Config, UnknownKeyIsReportedWithPosition) {
  try {
    parse_detector_config(read_file(fixtures() / "config/unknown_key.json"));
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_EQ(e.column(), 3u);
    EXPECT_NE(std::string(e.what()).find("ss9_foo"), std::string::npos);
  }
}

TEST(Config, TypeErrorsNameTheKey) {
  try {
    parse_detector_config("{\n\"ss2_fixed_count_min\": \"two\"\n}");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_EQ(e.column(), 1u);
    EXPECT_NE(std::string(e.what()).find("ss2_fixed_count_min"), std::string::npos);
  }
  EXPECT_THROW(parse_detector_config(R"({"ss5_region_attrs": ["zone", 3]})"), ConfigError);
  EXPECT_THROW(parse_detector_config(R"({"ss4_flag_missing_retention": 1})"), ConfigError);
  EXPECT_THROW(parse_detector_config(R"({"ss1_large_sizes": ["m5.large"]})"), ConfigError);
}

TEST(Config, ValidationFailuresPointAtTheKey) {
  try {
    parse_detector_config("{\"ss4_flag_missing_retention\": true,\n    \"ss7_max_resources_per_file\": 0}");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_EQ(e.column(), 5u);
  }
  EXPECT_THROW(parse_detector_config(R"({"ss2_compute_types": []})"), ConfigError);
}

TEST(Config, MalformedJsonHasLineAndColumn) {
  try {
    parse_detector_config("{\n  \"ss7_max_resources_per_file\": 5,\n  oops\n}");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_GE(e.column(), 3u);
  }
  EXPECT_THROW(parse_detector_config("[1, 2]"), ConfigError);
}

TEST(Config, LoadFromFiles) {
  auto loaded = load_config(std::nullopt);
  EXPECT_EQ(to_json(loaded.detectors), to_json(DetectorConfig::defaults()));
  EXPECT_EQ(loaded.catalog.smells.size(), 7u);

  loaded = load_config((fixtures() / "config/ss7_five.json").string());
  EXPECT_EQ(loaded.detectors.ss7_max_resources_per_file, 5);

  try {
    load_config((fixtures() / "config/unknown_key.json").string());
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("unknown_key.json"), std::string::npos);
    EXPECT_EQ(e.line(), 3u);
  }
  EXPECT_THROW(load_config(std::string("/nonexistent/config.json")), ConfigError);
  EXPECT_THROW(load_config(std::nullopt, std::string("/nonexistent/catalog.json")), ConfigError);
}

TEST(Config, LoweredThresholdChangesDetection) {
  auto file = hcl::parse(read_file(fixtures() / "config/six_resources.tf"), "six_resources.tf");
  EXPECT_TRUE(detect_ss7_monolithic(file, DetectorConfig::defaults()).empty());
  auto cfg = load_config((fixtures() / "config/ss7_five.json").string()).detectors;
  auto found = detect_ss7_monolithic(file, cfg);
  ASSERT_EQ(found.size(), 1u);
  EXPECT_EQ(found[0].evidence, "6");
}

#include "tfsmell/config.hpp"
#include "tfsmell/scanner.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <json.hpp>

#include <filesystem>
#include <sstream>
#include <unistd.h>

using namespace tfsmell;
namespace fs = std::filesystem;
using nlohmann::json;
using tfsmell::testing::fixtures;
using tfsmell::testing::synthetic_corpus;
using tfsmell::testing::TempDir;
using tfsmell::testing::write_corpus;
using tfsmell::testing::write_file;

namespace {

const DetectorConfig& cfg() {
  static const DetectorConfig c = DetectorConfig::defaults();
  return c;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST(Collect, FindsTfFilesSortedAndRelative) {
  TempDir tmp;
  write_file(tmp.path() / "b/main.tf", "locals {}\n");
  write_file(tmp.path() / "a/x.tf", "locals {}\n");
  write_file(tmp.path() / "a/readme.md", "no\n");
  write_file(tmp.path() / "a/x.tf.bak", "no\n");
  auto files = collect_sources(tmp.path());
  ASSERT_EQ(files.size(), 2u);
  EXPECT_EQ(files[0].path, "a/x.tf");
  EXPECT_EQ(files[1].path, "b/main.tf");
  EXPECT_TRUE(files[0].content.has_value());
}

TEST(Collect, SkipsSymlinks) {
  TempDir tmp;
  write_file(tmp.path() / "real/main.tf", "locals {}\n");
  fs::create_directory_symlink(tmp.path() / "real", tmp.path() / "linked");
  fs::create_symlink(tmp.path() / "real/main.tf", tmp.path() / "alias.tf");
  auto files = collect_sources(tmp.path());
  ASSERT_EQ(files.size(), 1u);
  EXPECT_EQ(files[0].path, "real/main.tf");
}

TEST(Collect, SingleFileRootAndMissingRoot) {
  auto files = collect_sources(fixtures() / "samples/ss4_logging.tf");
  ASSERT_EQ(files.size(), 1u);
  EXPECT_EQ(files[0].path, "ss4_logging.tf");
  EXPECT_THROW(collect_sources("/nonexistent/tfsmell"), std::runtime_error);
}

TEST(Scan, EmptyDirectory) {
  TempDir tmp;
  auto report = scan(tmp.path(), cfg());
  EXPECT_EQ(report.scanned_files, 0u);
  EXPECT_TRUE(report.findings.empty());
  EXPECT_THROW(prevalence(report), std::invalid_argument);
  auto j = json::parse(render(report, std::nullopt, ReportFormat::Json));
  EXPECT_EQ(j["scanned_files"], 0);
  EXPECT_TRUE(j["findings"].empty());
}

TEST(Scan, UnreadableAndBrokenFilesCountAsParseFailures) {
  auto files = synthetic_corpus(3, {});
  files.push_back({"broken/main.tf", std::string("resource \"a\" \"b\" {\n  x = = 1\n}\n")});
  files.push_back({"gone/main.tf", std::nullopt});
  auto report = scan_sources(files, cfg());
  EXPECT_EQ(report.scanned_files, 5u);
  EXPECT_EQ(report.parse_failures, 2u);
}

TEST(Scan, UnreadableFileOnDisk) {
  if (geteuid() == 0) GTEST_SKIP() << "root ignores file permissions";
  TempDir tmp;
  write_file(tmp.path() / "a/main.tf", "locals {}\n");
  fs::permissions(tmp.path() / "a/main.tf", fs::perms::none);
  auto report = scan(tmp.path(), cfg());
  EXPECT_EQ(report.scanned_files, 1u);
  EXPECT_EQ(report.parse_failures, 1u);
}

TEST(Scan, TenFileCorpusWithTwoMonoliths) {
  auto report = scan_sources(synthetic_corpus(10, {{SS7, {2, 7}}}), cfg());
  EXPECT_EQ(report.scanned_files, 10u);
  EXPECT_EQ(report.findings.size(), 2u);
  EXPECT_EQ(report.per_file_index.size(), 2u);
  auto stats = prevalence(report);
  EXPECT_EQ(stats.find(SS7)->fraction, (Rational{1, 5}));
  EXPECT_EQ(percent_string(stats.find(SS7)->fraction), "20.00");
  EXPECT_EQ(stats.find(SS1)->files_affected, 0u);
}

TEST(Scan, OneFileWithThreeSmellsCountsOncePerSmell) {
  auto report = scan_sources(synthetic_corpus(4, {{SS1, {1}}, {SS3, {1}}, {SS4, {1}}}), cfg());
  ASSERT_EQ(report.per_file_index.size(), 1u);
  EXPECT_EQ(report.per_file_index.begin()->second, (std::set<SmellId>{SS1, SS3, SS4}));
  auto stats = prevalence(report);
  for (auto id : {SS1, SS3, SS4}) EXPECT_EQ(stats.find(id)->fraction, (Rational{1, 4})) << to_string(id);
  for (auto id : {SS2, SS5, SS6, SS7}) EXPECT_EQ(stats.find(id)->files_affected, 0u) << to_string(id);
}

TEST(Scan, PrevalenceMatchesRandomPlans) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    std::map<SmellId, std::size_t> counts{{SS1, 3 + seed}, {SS2, 7}, {SS3, 11}, {SS4, 2 * seed},
                                          {SS5, 5},        {SS6, 1}, {SS7, 19}};
    auto plan = tfsmell::testing::random_plan(120, counts, seed);
    for (auto engine : {Engine::Ast, Engine::Pattern}) {
      auto stats = prevalence(scan_sources(synthetic_corpus(120, plan), cfg(), {engine, 3, seed}));
      for (const auto& [smell, n] : counts) {
        const auto* p = stats.find(smell);
        ASSERT_NE(p, nullptr);
        EXPECT_EQ(p->files_affected, n) << to_string(smell) << " " << to_string(engine);
        EXPECT_EQ(p->fraction.num * 120, n * p->fraction.den);
      }
    }
  }
}

TEST(Scan, ParallelAndShuffledRunsAreIdentical) {
  auto plan = tfsmell::testing::random_plan(60, {{SS1, 9}, {SS5, 4}, {SS6, 6}, {SS7, 5}}, 42);
  auto files = synthetic_corpus(60, plan);
  auto baseline = render(scan_sources(files, cfg()), std::nullopt, ReportFormat::Json);
  for (unsigned jobs : {2u, 4u, 8u}) {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      auto reversed = files;
      std::reverse(reversed.begin(), reversed.end());
      EXPECT_EQ(render(scan_sources(reversed, cfg(), {Engine::Ast, jobs, seed}), std::nullopt, ReportFormat::Json),
                baseline);
    }
  }
}

TEST(Rational, ReducesAndRejectsZeroDenominator) {
  EXPECT_EQ(make_rational(19, 200), (Rational{19, 200}));
  EXPECT_EQ(make_rational(20, 200), (Rational{1, 10}));
  EXPECT_EQ(make_rational(0, 7), (Rational{0, 1}));
  EXPECT_THROW(make_rational(1, 0), std::invalid_argument);
}

TEST(Rational, PercentRoundsHalfUpToTwoDecimals) {
  EXPECT_EQ(percent_string(make_rational(19, 200)), "9.50");
  EXPECT_EQ(percent_string(make_rational(1, 3)), "33.33");
  EXPECT_EQ(percent_string(make_rational(2, 3)), "66.67");
  EXPECT_EQ(percent_string(make_rational(1, 32)), "3.13");
  EXPECT_EQ(percent_string(make_rational(1, 16)), "6.25");
  EXPECT_EQ(percent_string(make_rational(1, 2000)), "0.05");
  EXPECT_EQ(percent_string(make_rational(1, 40000)), "0.00");
  EXPECT_EQ(percent_string(make_rational(1, 20000)), "0.01");
  EXPECT_EQ(percent_string(make_rational(0, 5)), "0.00");
  EXPECT_EQ(percent_string(make_rational(5, 5)), "100.00");
}

TEST(Render, TextListsFindingsThenSummaryThenRankedTable) {
  auto report = scan_sources(synthetic_corpus(10, {{SS7, {2, 7}}, {SS3, {1}}}), cfg());
  auto text = render(report, prevalence(report), ReportFormat::Text);
  auto lines = lines_of(text);
  ASSERT_GE(lines.size(), 4u);
  EXPECT_EQ(lines[0].rfind("d001/main.tf:", 0), 0u);
  EXPECT_NE(lines[0].find("SS3"), std::string::npos);
  EXPECT_EQ(lines[1].rfind("d002/main.tf:1:1: SS7", 0), 0u);
  EXPECT_EQ(lines[3], "3 findings in 3 of 10 files, engine ast");
  // Table: SS7 (20%) ranks above SS3 (10%), zero rows follow by id.
  auto ss7 = text.find("\nSS7");
  auto ss3 = text.find("\nSS3");
  auto ss1 = text.find("\nSS1");
  auto ss2 = text.find("\nSS2");
  EXPECT_LT(ss7, ss3);
  EXPECT_LT(ss3, ss1);
  EXPECT_LT(ss1, ss2);
  EXPECT_NE(text.find("20.00%"), std::string::npos);
}

TEST(Render, JsonIsCanonical) {
  auto report = scan_sources(synthetic_corpus(5, {{SS2, {0}}, {SS6, {4}}}), cfg());
  auto text = render(report, prevalence(report), ReportFormat::Json);
  auto j = json::parse(text);
  EXPECT_EQ(j.dump(), text);
  for (const char* key : {"scanned_files", "parse_failures", "engine", "config_digest", "findings",
                          "per_file_index", "prevalence"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_EQ(j["config_digest"], config_digest(cfg()));
  ASSERT_EQ(j["findings"].size(), 2u);
  const auto& f = j["findings"][0];
  EXPECT_EQ(f["smell"], "SS2");
  EXPECT_EQ(f["path"], "d000/main.tf");
  EXPECT_EQ(f["span"]["start_line"], 13);
  EXPECT_EQ(j["prevalence"]["SS6"]["numerator"], 1);
  EXPECT_EQ(j["prevalence"]["SS6"]["denominator"], 5);
  EXPECT_EQ(j["prevalence"]["SS6"]["percent"], "20.00");
  EXPECT_EQ(j["per_file_index"]["d004/main.tf"], json::array({"SS6"}));
}

TEST(Render, SarifDeclaresEveryRuleOnce) {
  auto report = scan(fixtures() / "smelly", cfg());
  auto j = json::parse(render(report, std::nullopt, ReportFormat::Sarif));
  EXPECT_EQ(j["version"], "2.1.0");
  const auto& run = j["runs"][0];
  const auto& rules = run["tool"]["driver"]["rules"];
  ASSERT_EQ(rules.size(), 7u);
  std::set<std::string> ids;
  for (const auto& r : rules) ids.insert(r["id"].get<std::string>());
  EXPECT_EQ(ids.size(), 7u);
  ASSERT_EQ(run["results"].size(), report.findings.size());
  for (const auto& r : run["results"]) {
    auto idx = r["ruleIndex"].get<std::size_t>();
    EXPECT_EQ(rules[idx]["id"], r["ruleId"]);
    EXPECT_GE(r["locations"][0]["physicalLocation"]["region"]["startLine"].get<int>(), 1);
  }
}

TEST(Render, FormatNames) {
  EXPECT_EQ(parse_format("sarif"), ReportFormat::Sarif);
  EXPECT_EQ(to_string(ReportFormat::Json), "json");
  EXPECT_THROW(parse_format("xml"), std::invalid_argument);
}

#pragma once

#include "tfsmell/catalog.hpp"
#include "tfsmell/detectors.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace tfsmell {

struct ScanReport {
  std::size_t scanned_files = 0;
  std::size_t parse_failures = 0;
  std::vector<SmellFinding> findings;  // canonical order
  // Only files with at least one finding appear here.
  std::map<std::string, std::set<SmellId>> per_file_index;
  std::string config_digest;
  Engine engine = Engine::Ast;
};

/// One input file. `content` is empty when the file could not be read.
struct SourceFile {
  std::string path;  // '/'-separated, relative to the scan root
  std::optional<std::string> content;
};

struct ScanOptions {
  Engine engine = Engine::Ast;
  unsigned jobs = 1;
  // When set, the work list is shuffled with this seed before dispatch.
  // The report does not depend on it.
  std::optional<std::uint64_t> shuffle_seed;
};

/// Every regular `*.tf` file under `root` (symlinks are not followed), with
/// paths relative to root. A root that is itself a file yields that file.
/// Throws std::runtime_error when root does not exist or cannot be listed.
std::vector<SourceFile> collect_sources(const std::filesystem::path& root);

ScanReport scan_sources(std::vector<SourceFile> files, const DetectorConfig& cfg, const ScanOptions& options = {});

ScanReport scan(const std::filesystem::path& root, const DetectorConfig& cfg, const ScanOptions& options = {});

/// Reduced fraction; `den` is never 0.
struct Rational {
  std::uint64_t num = 0;
  std::uint64_t den = 1;

  friend bool operator==(const Rational&, const Rational&) = default;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

Rational make_rational(std::uint64_t num, std::uint64_t den);

/// `r` as a percentage rounded half-up to two decimals, e.g. "9.67".
std::string percent_string(const Rational& r);

struct SmellPrevalence {
  SmellId smell;
  std::size_t files_affected = 0;
  Rational fraction;
};

struct CorpusStats {
  std::size_t scanned_files = 0;
  std::vector<SmellPrevalence> per_smell;  // catalog order

  const SmellPrevalence* find(SmellId id) const;
};

/// Throws std::invalid_argument when nothing was scanned.
CorpusStats prevalence(const ScanReport& report, const Catalog& catalog = builtin_catalog());

enum class ReportFormat : std::uint8_t { Text, Json, Sarif };

std::string_view to_string(ReportFormat format);
/// Throws std::invalid_argument for anything but text, json or sarif.
ReportFormat parse_format(std::string_view text);

/// Renders a report. `stats` adds the prevalence table (text) or object (json).
std::string render(const ScanReport& report, const std::optional<CorpusStats>& stats, ReportFormat format,
                   const Catalog& catalog = builtin_catalog());

struct SampleSet {
  std::uint64_t seed = 0;
  std::map<std::string, std::vector<std::string>> selections;

  std::size_t total() const;
  friend bool operator==(const SampleSet&, const SampleSet&) = default;
};

/// Picks 4 or 5 files per repository (all of them below 4) without
/// replacement. Generator: mt19937_64 seeded with `seed`; bounded draws use
/// rejection sampling; repositories are visited in sorted order; each
/// repository's files are sorted and deduplicated, then a partial
/// Fisher-Yates shuffle picks the first k. Selections are returned sorted.
/// Throws std::invalid_argument on an empty manifest.
SampleSet sample_stratified(const std::map<std::string, std::vector<std::string>>& manifest, std::uint64_t seed);

}  // namespace tfsmell

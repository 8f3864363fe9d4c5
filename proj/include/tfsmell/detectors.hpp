#pragma once

#include "tfsmell/catalog.hpp"
#include "tfsmell/hcl/ast.hpp"

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace tfsmell {

enum class Engine : std::uint8_t { Ast, Pattern };

std::string_view to_string(Engine engine);
Engine parse_engine(std::string_view text);

/// Evidence used when the smell is the *absence* of something (no retention
/// period, no backend). The span then points at the enclosing construct.
inline constexpr std::string_view kUnsetEvidence = "unset";

struct SmellFinding {
  SmellId smell;
  std::string path;
  hcl::SourceSpan span;
  std::string evidence;
  Engine engine = Engine::Ast;
  std::string message;
  // True when the finding is about the file as a whole (span = whole file).
  bool file_level = false;
};

/// Canonical order: path, start line, smell id, then column and evidence.
bool finding_less(const SmellFinding& a, const SmellFinding& b);
bool operator==(const SmellFinding& a, const SmellFinding& b);

/// Thresholds and resource-type tables used by the detectors. Every default
/// is a tool decision; see README for the rationale.
struct DetectorConfig {
  // provider prefix ("aws", "azurerm", "google") -> oversized instance sizes
  std::map<std::string, std::set<std::string>> ss1_large_sizes;
  int ss2_fixed_count_min = 2;
  std::set<std::string> ss2_compute_types;
  std::set<std::string> ss2_autoscaler_types;
  // Scope of the SS1/SS2 autoscaler suppression: false = file, true = directory.
  bool autoscaler_directory_scope = false;
  std::set<std::string> ss3_lifecycle_required_types;
  int ss4_retention_max_days = 90;
  bool ss4_flag_missing_retention = true;
  // log-group resource type -> retention attribute name
  std::map<std::string, std::string> ss4_log_retention_attrs;
  std::set<std::string> ss5_region_attrs;
  // Pattern engine only: treat comments mentioning another region as evidence.
  bool ss5_scan_comments = false;
  int ss7_max_resources_per_file = 10;

  static DetectorConfig defaults();
};

/// Throws std::invalid_argument when a threshold is < 1 or a required set is empty.
void validate(const DetectorConfig& cfg);

/// Region class of a region-like attribute value: zones lose their final
/// segment ("us-west1-a" -> "us-west1", "us-east-1a" -> "us-east-1"),
/// Azure display names are lowercased without spaces.
std::string normalize_region(std::string_view attribute, std::string_view value);

/// All files of one directory (one root module).
struct SourceDirectory {
  std::string path;
  std::vector<hcl::ConfigFile> files;
};

std::vector<SmellFinding> detect_ss1_overprovisioning(const hcl::ConfigFile& file, const DetectorConfig& cfg);
std::vector<SmellFinding> detect_ss2_no_autoscaling(const hcl::ConfigFile& file, const DetectorConfig& cfg);
std::vector<SmellFinding> detect_ss3_no_lifecycle(const hcl::ConfigFile& file, const DetectorConfig& cfg);
std::vector<SmellFinding> detect_ss4_excessive_logging(const hcl::ConfigFile& file, const DetectorConfig& cfg);
std::vector<SmellFinding> detect_ss5_cross_region_transfer(const hcl::ConfigFile& file, const DetectorConfig& cfg);
std::vector<SmellFinding> detect_ss6_local_state(const SourceDirectory& dir, const DetectorConfig& cfg);
std::vector<SmellFinding> detect_ss7_monolithic(const hcl::ConfigFile& file, const DetectorConfig& cfg);

namespace pattern {

// Text-pattern counterparts of the detectors above. They look only at
// `ConfigFile::source`, so they also work on files that failed to parse.
std::vector<SmellFinding> detect_ss1(const hcl::ConfigFile& file, const DetectorConfig& cfg);
std::vector<SmellFinding> detect_ss2(const hcl::ConfigFile& file, const DetectorConfig& cfg);
std::vector<SmellFinding> detect_ss3(const hcl::ConfigFile& file, const DetectorConfig& cfg);
std::vector<SmellFinding> detect_ss4(const hcl::ConfigFile& file, const DetectorConfig& cfg);
std::vector<SmellFinding> detect_ss5(const hcl::ConfigFile& file, const DetectorConfig& cfg);
std::vector<SmellFinding> detect_ss6(const SourceDirectory& dir, const DetectorConfig& cfg);
std::vector<SmellFinding> detect_ss7(const hcl::ConfigFile& file, const DetectorConfig& cfg);

}  // namespace pattern

/// Findings for one directory with the chosen engine, in canonical order.
std::vector<SmellFinding> detect_directory(const SourceDirectory& dir, const DetectorConfig& cfg, Engine engine);

/// Union of all seven detectors over every directory, in canonical order.
std::vector<SmellFinding> detect_all(const std::vector<SourceDirectory>& dirs, const DetectorConfig& cfg,
                                     Engine engine);

}  // namespace tfsmell

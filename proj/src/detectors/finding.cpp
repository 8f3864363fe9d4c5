#include "tfsmell/detectors.hpp"

#include <algorithm>
#include <cctype>
#include <regex>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace tfsmell {

std::string_view to_string(Engine engine) { return engine == Engine::Ast ? "ast" : "pattern"; }

Engine parse_engine(std::string_view text) {
  if (text == "ast") return Engine::Ast;
  if (text == "pattern") return Engine::Pattern;
  throw std::invalid_argument("unknown engine '" + std::string(text) + "'");
}

bool finding_less(const SmellFinding& a, const SmellFinding& b) {
  return std::tie(a.path, a.span.start_line, a.smell, a.span.start_col, a.evidence, a.engine) <
         std::tie(b.path, b.span.start_line, b.smell, b.span.start_col, b.evidence, b.engine);
}

bool operator==(const SmellFinding& a, const SmellFinding& b) {
  return a.smell == b.smell && a.path == b.path && a.span == b.span && a.evidence == b.evidence &&
         a.engine == b.engine && a.message == b.message && a.file_level == b.file_level;
}

namespace {

std::set<std::string> cross(std::initializer_list<std::string_view> prefixes,
                            std::initializer_list<std::string_view> suffixes, std::string_view glue) {
  std::set<std::string> out;
  for (auto p : prefixes) {
    for (auto s : suffixes) out.insert(std::string(p) + std::string(glue) + std::string(s));
  }
  return out;
}

}  // namespace

DetectorConfig DetectorConfig::defaults() {
  DetectorConfig cfg;

  // Sizes with 16 or more vCPUs according to the providers' size charts.
  cfg.ss1_large_sizes["aws"] = cross(
      {"m5", "m5a", "m5n", "m6a", "m6g", "m6i", "m7a", "m7g", "m7i", "c5", "c5a", "c5n", "c6a", "c6g", "c6i",
       "c7a", "c7g", "c7i", "r5", "r5a", "r5n", "r6a", "r6g", "r6i", "r7a", "r7g", "r7i", "x1", "x1e", "x2idn",
       "i3", "i4i", "d3", "g4dn", "g5", "p3", "p4d"},
      {"4xlarge", "8xlarge", "9xlarge", "12xlarge", "16xlarge", "18xlarge", "24xlarge", "32xlarge", "48xlarge",
       "metal"},
      ".");
  {
    auto& az = cfg.ss1_large_sizes["azurerm"];
    for (std::string_view series : {"D", "E"}) {
      for (int cores : {16, 32, 48, 64, 96}) {
        for (std::string_view suffix :
             {"_v3", "s_v3", "_v4", "s_v4", "as_v4", "ds_v4", "_v5", "s_v5", "as_v5", "ds_v5", "ads_v5"}) {
          az.insert("Standard_" + std::string(series) + std::to_string(cores) + std::string(suffix));
        }
      }
    }
    for (int cores : {16, 32, 48, 64, 72}) az.insert("Standard_F" + std::to_string(cores) + "s_v2");
    for (std::string_view m : {"Standard_M32ts", "Standard_M64s", "Standard_M128s", "Standard_NC24",
                               "Standard_NC24s_v3", "Standard_ND40rs_v2"}) {
      az.insert(std::string(m));
    }
  }
  cfg.ss1_large_sizes["google"] = cross(
      {"n1-standard", "n1-highmem", "n1-highcpu", "n2-standard", "n2-highmem", "n2-highcpu", "n2d-standard",
       "n2d-highmem", "n2d-highcpu", "e2-standard", "e2-highmem", "e2-highcpu", "c2-standard", "c2d-standard",
       "c3-standard", "m1-megamem", "m1-ultramem"},
      {"16", "30", "32", "48", "56", "60", "64", "80", "96", "112", "128", "160", "176", "224"}, "-");

  cfg.ss2_compute_types = {"aws_instance", "azurerm_virtual_machine", "azurerm_linux_virtual_machine",
                           "azurerm_windows_virtual_machine", "google_compute_instance"};
  cfg.ss2_autoscaler_types = {"aws_autoscaling_group",
                              "aws_autoscaling_policy",
                              "aws_appautoscaling_target",
                              "aws_appautoscaling_policy",
                              "azurerm_virtual_machine_scale_set",
                              "azurerm_linux_virtual_machine_scale_set",
                              "azurerm_windows_virtual_machine_scale_set",
                              "azurerm_orchestrated_virtual_machine_scale_set",
                              "azurerm_monitor_autoscale_setting",
                              "google_compute_autoscaler",
                              "google_compute_region_autoscaler"};
  cfg.ss3_lifecycle_required_types = {"azurerm_managed_disk",
                                      "aws_ebs_volume",
                                      "google_compute_disk",
                                      "google_compute_region_disk",
                                      "aws_db_instance",
                                      "aws_rds_cluster",
                                      "google_sql_database_instance",
                                      "azurerm_mssql_database",
                                      "azurerm_postgresql_server",
                                      "azurerm_mysql_server"};
  cfg.ss4_log_retention_attrs = {{"aws_cloudwatch_log_group", "retention_in_days"},
                                 {"azurerm_log_analytics_workspace", "retention_in_days"},
                                 {"google_logging_project_bucket_config", "retention_days"}};
  cfg.ss5_region_attrs = {"region", "location", "zone", "availability_zone"};
  return cfg;
}

void validate(const DetectorConfig& cfg) {
  auto positive = [](int v, const char* name) {
    if (v < 1) throw std::invalid_argument(std::string(name) + " must be >= 1");
  };
  positive(cfg.ss2_fixed_count_min, "ss2_fixed_count_min");
  positive(cfg.ss4_retention_max_days, "ss4_retention_max_days");
  positive(cfg.ss7_max_resources_per_file, "ss7_max_resources_per_file");
  auto nonempty = [](bool empty, const char* name) {
    if (empty) throw std::invalid_argument(std::string(name) + " must not be empty");
  };
  nonempty(cfg.ss1_large_sizes.empty(), "ss1_large_sizes");
  nonempty(cfg.ss2_compute_types.empty(), "ss2_compute_types");
  nonempty(cfg.ss2_autoscaler_types.empty(), "ss2_autoscaler_types");
  nonempty(cfg.ss3_lifecycle_required_types.empty(), "ss3_lifecycle_required_types");
  nonempty(cfg.ss4_log_retention_attrs.empty(), "ss4_log_retention_attrs");
  nonempty(cfg.ss5_region_attrs.empty(), "ss5_region_attrs");
}

std::string normalize_region(std::string_view attribute, std::string_view value) {
  std::string v;
  for (char c : value) {
    if (c != ' ') v += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  if (attribute != "zone" && attribute != "availability_zone") return v;
  static const std::regex kAwsZone(R"(^([a-z]{2}(-gov)?-[a-z]+-[0-9]+)[a-z]$)");
  std::smatch m;
  if (std::regex_match(v, m, kAwsZone)) return m[1].str();
  if (auto dash = v.rfind('-'); dash != std::string::npos && dash > 0) return v.substr(0, dash);
  return v;
}

namespace {

bool directory_has_autoscaler(const SourceDirectory& dir, const DetectorConfig& cfg) {
  static const std::regex header(R"re(^\s*resource\s+"([^"]+)")re");
  for (const auto& f : dir.files) {
    for (const hcl::Block* b : hcl::find_blocks(f, "resource")) {
      if (!b->labels.empty() && cfg.ss2_autoscaler_types.contains(b->labels[0])) return true;
    }
    // Files that failed to parse may still declare one.
    std::istringstream in(f.source);
    std::string line;
    std::smatch m;
    while (std::getline(in, line)) {
      if (std::regex_search(line, m, header) && cfg.ss2_autoscaler_types.contains(m[1].str())) return true;
    }
  }
  return false;
}

}  // namespace

std::vector<SmellFinding> detect_directory(const SourceDirectory& dir, const DetectorConfig& cfg, Engine engine) {
  std::vector<SmellFinding> out;
  auto append = [&out](std::vector<SmellFinding> more) {
    out.insert(out.end(), std::make_move_iterator(more.begin()), std::make_move_iterator(more.end()));
  };
  for (const auto& file : dir.files) {
    if (engine == Engine::Ast) {
      append(detect_ss1_overprovisioning(file, cfg));
      append(detect_ss2_no_autoscaling(file, cfg));
      append(detect_ss3_no_lifecycle(file, cfg));
      append(detect_ss4_excessive_logging(file, cfg));
      append(detect_ss5_cross_region_transfer(file, cfg));
      append(detect_ss7_monolithic(file, cfg));
    } else {
      append(pattern::detect_ss1(file, cfg));
      append(pattern::detect_ss2(file, cfg));
      append(pattern::detect_ss3(file, cfg));
      append(pattern::detect_ss4(file, cfg));
      append(pattern::detect_ss5(file, cfg));
      append(pattern::detect_ss7(file, cfg));
    }
  }
  append(engine == Engine::Ast ? detect_ss6_local_state(dir, cfg) : pattern::detect_ss6(dir, cfg));
  if (cfg.autoscaler_directory_scope && directory_has_autoscaler(dir, cfg)) {
    std::erase_if(out, [](const SmellFinding& f) { return f.smell == SS1 || f.smell == SS2; });
  }
  std::sort(out.begin(), out.end(), finding_less);
  return out;
}

std::vector<SmellFinding> detect_all(const std::vector<SourceDirectory>& dirs, const DetectorConfig& cfg,
                                     Engine engine) {
  std::vector<SmellFinding> out;
  for (const auto& dir : dirs) {
    auto found = detect_directory(dir, cfg, engine);
    out.insert(out.end(), std::make_move_iterator(found.begin()), std::make_move_iterator(found.end()));
  }
  std::sort(out.begin(), out.end(), finding_less);
  return out;
}

}  // namespace tfsmell

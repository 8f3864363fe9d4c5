#include "tfsmell/config.hpp"

#include "tfsmell/digest.hpp"

#include <json.hpp>

#include <fstream>
#include <functional>
#include <map>
#include <regex>
#include <sstream>

namespace tfsmell {

using nlohmann::json;

namespace {

std::pair<std::size_t, std::size_t> line_col(std::string_view text, std::size_t offset) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

[[noreturn]] void fail_at_key(std::string_view text, const std::string& key, const std::string& message) {
  std::regex re("\"" + std::regex_replace(key, std::regex(R"([.^$|()\[\]{}*+?\\])"), R"(\$&)") + "\"\\s*:");
  std::cmatch m;
  if (std::regex_search(text.data(), text.data() + text.size(), m, re)) {
    auto [line, col] = line_col(text, static_cast<std::size_t>(m.position(0)));
    throw ConfigError(message + " at line " + std::to_string(line) + ", column " + std::to_string(col), line, col);
  }
  throw ConfigError(message, 0, 0);
}

std::set<std::string> string_set(const json& v) {
  if (!v.is_array()) throw std::invalid_argument("expected an array of strings");
  std::set<std::string> out;
  for (const auto& item : v) {
    if (!item.is_string()) throw std::invalid_argument("expected an array of strings");
    out.insert(item.get<std::string>());
  }
  return out;
}

int integer(const json& v) {
  if (!v.is_number_integer()) throw std::invalid_argument("expected an integer");
  return v.get<int>();
}

bool boolean(const json& v) {
  if (!v.is_boolean()) throw std::invalid_argument("expected true or false");
  return v.get<bool>();
}

using Setter = std::function<void(DetectorConfig&, const json&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> kSetters{
      {"ss1_large_sizes",
       [](DetectorConfig& c, const json& v) {
         if (!v.is_object()) throw std::invalid_argument("expected an object of provider -> sizes");
         c.ss1_large_sizes.clear();
         for (const auto& [provider, sizes] : v.items()) c.ss1_large_sizes[provider] = string_set(sizes);
       }},
      {"ss2_fixed_count_min", [](DetectorConfig& c, const json& v) { c.ss2_fixed_count_min = integer(v); }},
      {"ss2_compute_types", [](DetectorConfig& c, const json& v) { c.ss2_compute_types = string_set(v); }},
      {"ss2_autoscaler_types", [](DetectorConfig& c, const json& v) { c.ss2_autoscaler_types = string_set(v); }},
      {"autoscaler_directory_scope",
       [](DetectorConfig& c, const json& v) { c.autoscaler_directory_scope = boolean(v); }},
      {"ss3_lifecycle_required_types",
       [](DetectorConfig& c, const json& v) { c.ss3_lifecycle_required_types = string_set(v); }},
      {"ss4_retention_max_days", [](DetectorConfig& c, const json& v) { c.ss4_retention_max_days = integer(v); }},
      {"ss4_flag_missing_retention",
       [](DetectorConfig& c, const json& v) { c.ss4_flag_missing_retention = boolean(v); }},
      {"ss4_log_retention_attrs",
       [](DetectorConfig& c, const json& v) {
         if (!v.is_object()) throw std::invalid_argument("expected an object of resource type -> attribute");
         c.ss4_log_retention_attrs.clear();
         for (const auto& [type, attr] : v.items()) {
           if (!attr.is_string()) throw std::invalid_argument("expected attribute names as strings");
           c.ss4_log_retention_attrs[type] = attr.get<std::string>();
         }
       }},
      {"ss5_region_attrs", [](DetectorConfig& c, const json& v) { c.ss5_region_attrs = string_set(v); }},
      {"ss5_scan_comments", [](DetectorConfig& c, const json& v) { c.ss5_scan_comments = boolean(v); }},
      {"ss7_max_resources_per_file",
       [](DetectorConfig& c, const json& v) { c.ss7_max_resources_per_file = integer(v); }},
  };
  return kSetters;
}

}  // namespace

DetectorConfig parse_detector_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    auto [line, col] = line_col(text, e.byte > 0 ? e.byte - 1 : 0);
    throw ConfigError("malformed config at line " + std::to_string(line) + ", column " + std::to_string(col),
                      line, col);
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object", 1, 1);

  DetectorConfig cfg = DetectorConfig::defaults();
  for (const auto& [key, value] : doc.items()) {
    auto it = setters().find(key);
    if (it == setters().end()) fail_at_key(text, key, "unknown config key '" + key + "'");
    try {
      it->second(cfg, value);
    } catch (const std::exception& e) {
      fail_at_key(text, key, "invalid value for '" + key + "': " + e.what());
    }
  }
  try {
    validate(cfg);
  } catch (const std::invalid_argument& e) {
    std::string msg = e.what();
    fail_at_key(text, msg.substr(0, msg.find(' ')), msg);
  }
  return cfg;
}

std::string to_json(const DetectorConfig& cfg) {
  json j;
  json sizes = json::object();
  for (const auto& [provider, set] : cfg.ss1_large_sizes) sizes[provider] = set;
  j["ss1_large_sizes"] = sizes;
  j["ss2_fixed_count_min"] = cfg.ss2_fixed_count_min;
  j["ss2_compute_types"] = cfg.ss2_compute_types;
  j["ss2_autoscaler_types"] = cfg.ss2_autoscaler_types;
  j["autoscaler_directory_scope"] = cfg.autoscaler_directory_scope;
  j["ss3_lifecycle_required_types"] = cfg.ss3_lifecycle_required_types;
  j["ss4_retention_max_days"] = cfg.ss4_retention_max_days;
  j["ss4_flag_missing_retention"] = cfg.ss4_flag_missing_retention;
  j["ss4_log_retention_attrs"] = cfg.ss4_log_retention_attrs;
  j["ss5_region_attrs"] = cfg.ss5_region_attrs;
  j["ss5_scan_comments"] = cfg.ss5_scan_comments;
  j["ss7_max_resources_per_file"] = cfg.ss7_max_resources_per_file;
  return j.dump();
}

std::string config_digest(const DetectorConfig& cfg) { return sha256_hex(to_json(cfg)); }

LoadedConfig load_config(const std::optional<std::string>& config_path,
                         const std::optional<std::string>& catalog_path) {
  LoadedConfig out{DetectorConfig::defaults(), builtin_catalog()};
  if (config_path) {
    std::ifstream in(*config_path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file '" + *config_path + "'", 0, 0);
    std::stringstream buf;
    buf << in.rdbuf();
    try {
      out.detectors = parse_detector_config(buf.str());
    } catch (const ConfigError& e) {
      throw ConfigError(*config_path + ": " + e.what(), e.line(), e.column());
    }
  }
  if (catalog_path) {
    try {
      out.catalog = load_catalog_file(*catalog_path);
    } catch (const std::runtime_error& e) {
      throw ConfigError(e.what(), 0, 0);
    }
  }
  return out;
}

}  // namespace tfsmell

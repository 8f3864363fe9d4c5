#include "tfsmell/detectors.hpp"

#include <algorithm>
#include <optional>
#include <regex>
#include <utility>

namespace tfsmell {

using hcl::Block;
using hcl::ConfigFile;
using hcl::Expression;
using hcl::ValueKind;

namespace {

constexpr std::string_view kSizeAttributes[] = {"vm_size", "size", "instance_type", "machine_type"};

struct Resource {
  const Block* block;
  const std::string& type() const { return block->labels[0]; }
  const std::string& name() const { return block->labels[1]; }
  std::string address() const { return type() + "." + name(); }
};

std::vector<Resource> resources(const ConfigFile& file) {
  std::vector<Resource> out;
  for (const Block* b : hcl::find_blocks(file, "resource")) {
    if (b->labels.size() == 2) out.push_back({b});
  }
  return out;
}

std::optional<std::string> literal(const Expression* e) {
  if (e && e->kind == ValueKind::String) return e->text;
  return std::nullopt;
}

std::string provider_of(const std::string& type) { return type.substr(0, type.find('_')); }

bool has_autoscaler(const ConfigFile& file, const DetectorConfig& cfg) {
  auto rs = resources(file);
  return std::any_of(rs.begin(), rs.end(),
                     [&](const Resource& r) { return cfg.ss2_autoscaler_types.contains(r.type()); });
}

SmellFinding finding(SmellId smell, const ConfigFile& file, const hcl::SourceSpan& span, std::string evidence,
                     std::string message) {
  SmellFinding f;
  f.smell = smell;
  f.path = file.path;
  f.span = span;
  f.evidence = std::move(evidence);
  f.engine = Engine::Ast;
  f.message = std::move(message);
  return f;
}

void references_in_text(const std::string& text, std::vector<std::vector<std::string>>& out) {
  static const std::regex kRef(R"(([A-Za-z_][A-Za-z0-9_-]*)\.([A-Za-z_][A-Za-z0-9_-]*))");
  for (auto it = std::sregex_iterator(text.begin(), text.end(), kRef); it != std::sregex_iterator(); ++it) {
    out.push_back({(*it)[1].str(), (*it)[2].str()});
  }
}

void references(const Expression& e, std::vector<std::vector<std::string>>& out) {
  switch (e.kind) {
    case ValueKind::Reference:
      out.push_back(e.path);
      break;
    case ValueKind::Template:
      for (const auto& part : e.parts) {
        if (part.kind == hcl::TemplatePart::Kind::Reference) out.push_back(part.path);
        if (part.kind == hcl::TemplatePart::Kind::Expression) references_in_text(part.text, out);
      }
      break;
    case ValueKind::List:
      for (const auto& item : e.items) references(item, out);
      break;
    case ValueKind::Map:
      for (const auto& entry : e.entries) references(entry.value, out);
      break;
    case ValueKind::Opaque:
      references_in_text(e.text, out);
      break;
    default:
      break;
  }
}

void references(const Block& b, std::vector<std::vector<std::string>>& out) {
  for (const auto& node : b.body) {
    if (const auto* a = node.attribute()) references(a->value, out);
    if (const auto* nested = node.block()) references(*nested, out);
  }
}

}  // namespace

std::vector<SmellFinding> detect_ss1_overprovisioning(const ConfigFile& file, const DetectorConfig& cfg) {
  std::vector<SmellFinding> out;
  if (has_autoscaler(file, cfg)) return out;
  for (const auto& r : resources(file)) {
    auto sizes = cfg.ss1_large_sizes.find(provider_of(r.type()));
    if (sizes == cfg.ss1_large_sizes.end()) continue;
    for (auto attr : kSizeAttributes) {
      const Expression* value = hcl::get_attribute(*r.block, attr);
      auto size = literal(value);
      if (!size || !sizes->second.contains(*size)) continue;
      out.push_back(finding(SS1, file, value->span, *size,
                            r.address() + " uses oversized " + std::string(attr) + " '" + *size +
                                "' with no autoscaling in the file"));
    }
  }
  return out;
}

std::vector<SmellFinding> detect_ss2_no_autoscaling(const ConfigFile& file, const DetectorConfig& cfg) {
  std::vector<SmellFinding> out;
  if (has_autoscaler(file, cfg)) return out;
  for (const auto& r : resources(file)) {
    if (!cfg.ss2_compute_types.contains(r.type())) continue;
    const Expression* count = hcl::get_attribute(*r.block, "count");
    if (!count || count->kind != ValueKind::Number || count->number < cfg.ss2_fixed_count_min) continue;
    out.push_back(finding(SS2, file, count->span, "count=" + count->text,
                          r.address() + " runs a fixed count of " + count->text + " with no autoscaler"));
  }
  return out;
}

std::vector<SmellFinding> detect_ss3_no_lifecycle(const ConfigFile& file, const DetectorConfig& cfg) {
  std::vector<SmellFinding> out;
  for (const auto& r : resources(file)) {
    if (!cfg.ss3_lifecycle_required_types.contains(r.type())) continue;
    if (!hcl::find_blocks(*r.block, {"lifecycle", {}, false}).empty()) continue;
    out.push_back(finding(SS3, file, r.block->header, r.type(), r.address() + " declares no lifecycle block"));
  }
  return out;
}

std::vector<SmellFinding> detect_ss4_excessive_logging(const ConfigFile& file, const DetectorConfig& cfg) {
  std::vector<SmellFinding> out;
  for (const auto& r : resources(file)) {
    auto attr = cfg.ss4_log_retention_attrs.find(r.type());
    if (attr == cfg.ss4_log_retention_attrs.end()) continue;
    const Expression* retention = hcl::get_attribute(*r.block, attr->second);
    if (!retention) {
      if (cfg.ss4_flag_missing_retention) {
        out.push_back(finding(SS4, file, r.block->header, std::string(kUnsetEvidence),
                              r.address() + " sets no " + attr->second + "; logs are kept forever"));
      }
      continue;
    }
    if (retention->kind != ValueKind::Number) continue;
    // A retention of 0 means "never expire".
    if (retention->number > cfg.ss4_retention_max_days || retention->number == 0) {
      out.push_back(finding(SS4, file, retention->span, retention->text,
                            r.address() + " keeps logs for " + retention->text + " days (limit " +
                                std::to_string(cfg.ss4_retention_max_days) + ")"));
    }
  }
  return out;
}

std::vector<SmellFinding> detect_ss5_cross_region_transfer(const ConfigFile& file, const DetectorConfig& cfg) {
  std::vector<SmellFinding> out;
  auto rs = resources(file);
  std::vector<std::optional<std::string>> region(rs.size());
  for (std::size_t i = 0; i < rs.size(); ++i) {
    for (const auto& node : rs[i].block->body) {
      const auto* a = node.attribute();
      if (!a || !cfg.ss5_region_attrs.contains(a->name) || a->value.kind != ValueKind::String) continue;
      region[i] = normalize_region(a->name, a->value.text);
      break;
    }
  }
  std::set<std::pair<std::size_t, std::size_t>> reported;
  for (std::size_t i = 0; i < rs.size(); ++i) {
    if (!region[i]) continue;
    std::vector<std::vector<std::string>> refs;
    references(*rs[i].block, refs);
    for (const auto& path : refs) {
      if (path.size() < 2) continue;
      for (std::size_t j = 0; j < rs.size(); ++j) {
        if (j == i || !region[j] || rs[j].type() != path[0] || rs[j].name() != path[1]) continue;
        if (*region[i] == *region[j]) continue;
        if (!reported.insert(std::minmax(i, j)).second) continue;
        out.push_back(finding(SS5, file, rs[i].block->span, rs[j].address(),
                              rs[i].address() + " (" + *region[i] + ") exchanges data with " + rs[j].address() +
                                  " (" + *region[j] + ")"));
      }
    }
  }
  return out;
}

std::vector<SmellFinding> detect_ss6_local_state(const SourceDirectory& dir, const DetectorConfig&) {
  std::vector<SmellFinding> out;
  std::vector<const ConfigFile*> files;
  for (const auto& f : dir.files) files.push_back(&f);
  std::sort(files.begin(), files.end(), [](const auto* a, const auto* b) { return a->path < b->path; });

  for (const ConfigFile* f : files) {
    for (const Block* tf : hcl::find_blocks(*f, "terraform")) {
      if (!hcl::find_blocks(*tf, {"cloud", {}, false}).empty()) return out;
      for (const Block* backend : hcl::find_blocks(*tf, {"backend", {}, false})) {
        if (!backend->labels.empty() && backend->labels[0] != "local") return out;
      }
    }
  }

  for (const ConfigFile* f : files) {
    auto tfs = hcl::find_blocks(*f, "terraform");
    if (tfs.empty()) continue;
    auto local = hcl::find_blocks(*tfs.front(), {"backend", {"local"}, false});
    if (!local.empty()) {
      out.push_back(finding(SS6, *f, local.front()->header, "local",
                            "state is kept by the local backend; no remote backend in this directory"));
    } else {
      out.push_back(finding(SS6, *f, tfs.front()->header, std::string(kUnsetEvidence),
                            "terraform block configures no remote backend for this directory"));
    }
  }
  if (out.empty() && !files.empty()) {
    SmellFinding f = finding(SS6, *files.front(), files.front()->whole_span(), std::string(kUnsetEvidence),
                             "no terraform block or remote backend in this directory");
    f.file_level = true;
    out.push_back(std::move(f));
  }
  return out;
}

std::vector<SmellFinding> detect_ss7_monolithic(const ConfigFile& file, const DetectorConfig& cfg) {
  std::vector<SmellFinding> out;
  auto count = hcl::find_blocks(file, "resource").size();
  if (count < static_cast<std::size_t>(cfg.ss7_max_resources_per_file)) return out;
  SmellFinding f = finding(SS7, file, file.whole_span(), std::to_string(count),
                           "file declares " + std::to_string(count) + " resources (threshold " +
                               std::to_string(cfg.ss7_max_resources_per_file) + ")");
  f.file_level = true;
  out.push_back(std::move(f));
  return out;
}

}  // namespace tfsmell

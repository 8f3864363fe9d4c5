// Regex-driven detectors. Each smell is matched line by line against the raw
// file text, the way a grep-style corpus study would do it. Resource bodies
// are approximated as the lines between a `resource "type" "name" {` header
// in column 1 and the next line that starts a new top-level item.

#include "tfsmell/detectors.hpp"

#include <algorithm>
#include <cctype>
#include <optional>
#include <regex>
#include <set>

namespace tfsmell::pattern {

using hcl::ConfigFile;
using hcl::SourceSpan;

namespace {

struct Line {
  std::size_t begin;  // byte offset
  std::string text;   // without the line terminator
};

std::vector<Line> split_lines(const std::string& src) {
  std::vector<Line> out;
  std::size_t start = 0;
  while (true) {
    std::size_t nl = src.find('\n', start);
    std::size_t stop = nl == std::string::npos ? src.size() : nl;
    std::string text = src.substr(start, stop - start);
    if (!text.empty() && text.back() == '\r') text.pop_back();
    out.push_back({start, std::move(text)});
    if (nl == std::string::npos) break;
    start = nl + 1;
  }
  return out;
}

std::uint32_t column_of(const std::string& src, std::size_t line_begin, std::size_t offset) {
  std::uint32_t col = 1;
  std::size_t i = line_begin;
  if (i == 0 && src.starts_with("\xEF\xBB\xBF")) i = 3;
  for (; i < offset; ++i) {
    if ((static_cast<unsigned char>(src[i]) & 0xC0) != 0x80) ++col;
  }
  return col;
}

SourceSpan span_on_line(const std::string& src, const std::vector<Line>& lines, std::size_t index,
                        std::size_t from, std::size_t to) {
  const Line& l = lines[index];
  SourceSpan s;
  s.start_line = s.end_line = static_cast<std::uint32_t>(index + 1);
  s.begin = l.begin + from;
  s.end = l.begin + to;
  s.start_col = column_of(src, l.begin, s.begin);
  s.end_col = column_of(src, l.begin, s.end);
  return s;
}

struct Segment {
  std::string type;
  std::string name;
  std::size_t header;  // line index
  std::size_t end;     // one past the last line
  std::size_t header_len;
};

const std::regex& resource_header() {
  static const std::regex re(R"re(^resource[ \t]+"([^"]+)"[ \t]+"([^"]+)"[ \t]*\{)re");
  return re;
}

bool starts_top_level_item(const std::string& line) {
  return !line.empty() && (std::isalpha(static_cast<unsigned char>(line[0])) || line[0] == '_');
}

std::vector<Segment> segments(const std::vector<Line>& lines) {
  std::vector<Segment> out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::smatch m;
    if (!std::regex_search(lines[i].text, m, resource_header())) continue;
    std::size_t end = i + 1;
    while (end < lines.size() && !starts_top_level_item(lines[end].text)) ++end;
    out.push_back({m[1].str(), m[2].str(), i, end, static_cast<std::size_t>(m.length(0))});
  }
  return out;
}

bool is_comment_line(const std::string& line) {
  static const std::regex re(R"(^\s*(#|//))");
  return std::regex_search(line, re);
}

SmellFinding make(SmellId smell, const ConfigFile& file, SourceSpan span, std::string evidence,
                  std::string message) {
  SmellFinding f;
  f.smell = smell;
  f.path = file.path;
  f.span = span;
  f.evidence = std::move(evidence);
  f.engine = Engine::Pattern;
  f.message = std::move(message);
  return f;
}

SmellFinding whole_file(SmellId smell, const ConfigFile& file, std::string evidence, std::string message) {
  SmellFinding f = make(smell, file, file.whole_span(), std::move(evidence), std::move(message));
  f.file_level = true;
  return f;
}

bool mentions_autoscaler(const std::vector<Line>& lines, const DetectorConfig& cfg) {
  for (const auto& l : lines) {
    std::smatch m;
    if (std::regex_search(l.text, m, resource_header()) && cfg.ss2_autoscaler_types.contains(m[1].str())) {
      return true;
    }
  }
  return false;
}

}  // namespace

std::vector<SmellFinding> detect_ss1(const ConfigFile& file, const DetectorConfig& cfg) {
  static const std::regex re(R"re(^\s*(vm_size|size|instance_type|machine_type)\s*=\s*("([^"]+)"))re");
  std::vector<SmellFinding> out;
  auto lines = split_lines(file.source);
  if (mentions_autoscaler(lines, cfg)) return out;
  for (const auto& seg : segments(lines)) {
    for (std::size_t i = seg.header + 1; i < seg.end; ++i) {
      std::smatch m;
      if (!std::regex_search(lines[i].text, m, re)) continue;
      std::string size = m[3].str();
      bool large = std::any_of(cfg.ss1_large_sizes.begin(), cfg.ss1_large_sizes.end(),
                               [&](const auto& kv) { return kv.second.contains(size); });
      if (!large) continue;
      auto from = static_cast<std::size_t>(m.position(2));
      out.push_back(make(SS1, file, span_on_line(file.source, lines, i, from, from + m.length(2)), size,
                         "oversized " + m[1].str() + " '" + size + "' matched"));
    }
  }
  return out;
}

std::vector<SmellFinding> detect_ss2(const ConfigFile& file, const DetectorConfig& cfg) {
  static const std::regex re(R"(^\s*count\s*=\s*([0-9]+)\s*(#.*|//.*)?$)");
  std::vector<SmellFinding> out;
  auto lines = split_lines(file.source);
  if (mentions_autoscaler(lines, cfg)) return out;
  for (const auto& seg : segments(lines)) {
    if (!cfg.ss2_compute_types.contains(seg.type)) continue;
    for (std::size_t i = seg.header + 1; i < seg.end; ++i) {
      std::smatch m;
      if (!std::regex_search(lines[i].text, m, re)) continue;
      if (std::stoll(m[1].str()) < cfg.ss2_fixed_count_min) continue;
      auto from = static_cast<std::size_t>(lines[i].text.find("count"));
      auto to = static_cast<std::size_t>(m.position(1) + m.length(1));
      out.push_back(make(SS2, file, span_on_line(file.source, lines, i, from, to), "count=" + m[1].str(),
                         "fixed count " + m[1].str() + " on " + seg.type + " without an autoscaler"));
    }
  }
  return out;
}

std::vector<SmellFinding> detect_ss3(const ConfigFile& file, const DetectorConfig& cfg) {
  static const std::regex re(R"(^\s*lifecycle\s*\{)");
  std::vector<SmellFinding> out;
  auto lines = split_lines(file.source);
  for (const auto& seg : segments(lines)) {
    if (!cfg.ss3_lifecycle_required_types.contains(seg.type)) continue;
    bool found = false;
    for (std::size_t i = seg.header + 1; i < seg.end && !found; ++i) found = std::regex_search(lines[i].text, re);
    if (found) continue;
    out.push_back(make(SS3, file, span_on_line(file.source, lines, seg.header, 0, seg.header_len), seg.type,
                       seg.type + "." + seg.name + " has no lifecycle block"));
  }
  return out;
}

std::vector<SmellFinding> detect_ss4(const ConfigFile& file, const DetectorConfig& cfg) {
  std::vector<SmellFinding> out;
  auto lines = split_lines(file.source);
  for (const auto& seg : segments(lines)) {
    auto attr = cfg.ss4_log_retention_attrs.find(seg.type);
    if (attr == cfg.ss4_log_retention_attrs.end()) continue;
    const std::regex assigned("^\\s*" + attr->second + "\\s*=");
    const std::regex numeric("^\\s*" + attr->second + "\\s*=\\s*([0-9]+)\\b");
    bool present = false;
    for (std::size_t i = seg.header + 1; i < seg.end; ++i) {
      if (!std::regex_search(lines[i].text, assigned)) continue;
      present = true;
      std::smatch m;
      if (!std::regex_search(lines[i].text, m, numeric)) continue;
      long long days = std::stoll(m[1].str());
      if (days > cfg.ss4_retention_max_days || days == 0) {
        auto from = static_cast<std::size_t>(m.position(1));
        out.push_back(make(SS4, file, span_on_line(file.source, lines, i, from, from + m.length(1)), m[1].str(),
                           seg.type + " retains logs for " + m[1].str() + " days"));
      }
    }
    if (!present && cfg.ss4_flag_missing_retention) {
      out.push_back(make(SS4, file, span_on_line(file.source, lines, seg.header, 0, seg.header_len),
                         std::string(kUnsetEvidence), seg.type + " has no " + attr->second));
    }
  }
  return out;
}

std::vector<SmellFinding> detect_ss5(const ConfigFile& file, const DetectorConfig& cfg) {
  static const std::regex re(R"re(^\s*([A-Za-z_]+)\s*=\s*"([^"$]+)")re");
  static const std::regex remote_comment(R"((another|different|other|cross)[- ]region)", std::regex::icase);
  std::vector<SmellFinding> out;
  auto lines = split_lines(file.source);
  std::set<std::string> regions;
  bool comment_hint = false;
  for (const auto& l : lines) {
    if (is_comment_line(l.text)) {
      comment_hint = comment_hint || std::regex_search(l.text, remote_comment);
      continue;
    }
    std::smatch m;
    if (std::regex_search(l.text, m, re) && cfg.ss5_region_attrs.contains(m[1].str())) {
      regions.insert(normalize_region(m[1].str(), m[2].str()));
    }
    // Trailing comments count too when comment scanning is on.
    if (auto hash = l.text.find('#'); hash != std::string::npos) {
      comment_hint = comment_hint || std::regex_search(l.text.substr(hash), remote_comment);
    }
  }
  std::string joined;
  for (const auto& r : regions) joined += (joined.empty() ? "" : ",") + r;
  if (regions.size() >= 2) {
    out.push_back(whole_file(SS5, file, joined, "resources span " + std::to_string(regions.size()) + " regions: " + joined));
  } else if (cfg.ss5_scan_comments && comment_hint && !regions.empty()) {
    out.push_back(whole_file(SS5, file, joined, "a comment notes transfers from " + joined + " to another region"));
  }
  return out;
}

std::vector<SmellFinding> detect_ss6(const SourceDirectory& dir, const DetectorConfig&) {
  static const std::regex backend_re(R"re(^\s*backend\s+"([^"]+)")re");
  static const std::regex cloud_re(R"(^\s*cloud\s*\{)");
  static const std::regex terraform_re(R"(^terraform\s*\{)");
  std::vector<SmellFinding> out;
  std::vector<const ConfigFile*> files;
  for (const auto& f : dir.files) files.push_back(&f);
  std::sort(files.begin(), files.end(), [](const auto* a, const auto* b) { return a->path < b->path; });

  std::vector<std::vector<Line>> lines;
  for (const ConfigFile* f : files) {
    lines.push_back(split_lines(f->source));
    for (const auto& l : lines.back()) {
      std::smatch m;
      if (std::regex_search(l.text, cloud_re)) return {};
      if (std::regex_search(l.text, m, backend_re) && m[1].str() != "local") return {};
    }
  }
  for (std::size_t k = 0; k < files.size(); ++k) {
    const auto& ls = lines[k];
    std::optional<std::size_t> tf_line;
    std::optional<std::size_t> local_line;
    for (std::size_t i = 0; i < ls.size(); ++i) {
      if (!tf_line && std::regex_search(ls[i].text, terraform_re)) tf_line = i;
      std::smatch m;
      if (!local_line && std::regex_search(ls[i].text, m, backend_re)) local_line = i;
    }
    if (!tf_line) continue;
    if (local_line) {
      auto from = ls[*local_line].text.find("backend");
      out.push_back(make(SS6, *files[k],
                         span_on_line(files[k]->source, ls, *local_line, from, ls[*local_line].text.size()), "local",
                         "backend \"local\" keeps state on disk"));
    } else {
      out.push_back(make(SS6, *files[k], span_on_line(files[k]->source, ls, *tf_line, 0, ls[*tf_line].text.size()),
                         std::string(kUnsetEvidence), "terraform block without a remote backend"));
    }
  }
  if (out.empty() && !files.empty()) {
    out.push_back(whole_file(SS6, *files.front(), std::string(kUnsetEvidence), "no remote backend in this directory"));
  }
  return out;
}

std::vector<SmellFinding> detect_ss7(const ConfigFile& file, const DetectorConfig& cfg) {
  std::vector<SmellFinding> out;
  auto lines = split_lines(file.source);
  std::size_t count = 0;
  for (const auto& l : lines) count += std::regex_search(l.text, resource_header()) ? 1 : 0;
  if (count >= static_cast<std::size_t>(cfg.ss7_max_resources_per_file)) {
    out.push_back(whole_file(SS7, file, std::to_string(count), std::to_string(count) + " resource headers in one file"));
  }
  return out;
}

}  // namespace tfsmell::pattern

#include "tfsmell/scanner.hpp"

#include <json.hpp>

#include <algorithm>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace tfsmell {

using nlohmann::json;

std::string_view to_string(ReportFormat format) {
  switch (format) {
    case ReportFormat::Text:
      return "text";
    case ReportFormat::Json:
      return "json";
    case ReportFormat::Sarif:
      return "sarif";
  }
  return "text";
}

ReportFormat parse_format(std::string_view text) {
  if (text == "text") return ReportFormat::Text;
  if (text == "json") return ReportFormat::Json;
  if (text == "sarif") return ReportFormat::Sarif;
  throw std::invalid_argument("unknown format '" + std::string(text) + "'");
}

namespace {

std::string smell_name(const Catalog& catalog, SmellId id) {
  const auto* d = catalog.find(id);
  return d ? d->name : to_string(id);
}

// Descending prevalence, then ascending id.
std::vector<SmellPrevalence> ranked(const CorpusStats& stats) {
  auto rows = stats.per_smell;
  std::stable_sort(rows.begin(), rows.end(), [](const SmellPrevalence& a, const SmellPrevalence& b) {
    auto lhs = a.fraction.num * b.fraction.den;
    auto rhs = b.fraction.num * a.fraction.den;
    if (lhs != rhs) return lhs > rhs;
    return a.smell < b.smell;
  });
  return rows;
}

std::string render_text(const ScanReport& report, const std::optional<CorpusStats>& stats, const Catalog& catalog) {
  std::ostringstream out;
  for (const auto& f : report.findings) {
    out << f.path << ':' << f.span.start_line << ':' << f.span.start_col << ": " << to_string(f.smell) << ' '
        << smell_name(catalog, f.smell) << ": " << f.message << " [" << f.evidence << "]\n";
  }
  out << report.findings.size() << " finding" << (report.findings.size() == 1 ? "" : "s") << " in "
      << report.per_file_index.size() << " of " << report.scanned_files << " files";
  if (report.parse_failures) out << " (" << report.parse_failures << " with parse errors)";
  out << ", engine " << to_string(report.engine) << '\n';
  if (!stats) return out.str();

  std::size_t width = 4;
  for (const auto& p : stats->per_smell) width = std::max(width, smell_name(catalog, p.smell).size());
  out << '\n'
      << std::left << std::setw(6) << "smell" << std::setw(static_cast<int>(width) + 2) << "name" << std::right
      << std::setw(8) << "files" << std::setw(12) << "prevalence" << '\n';
  for (const auto& p : ranked(*stats)) {
    out << std::left << std::setw(6) << to_string(p.smell) << std::setw(static_cast<int>(width) + 2)
        << smell_name(catalog, p.smell) << std::right << std::setw(8) << p.files_affected << std::setw(11)
        << percent_string(p.fraction) << "%\n";
  }
  return out.str();
}

json span_json(const hcl::SourceSpan& s) {
  return {{"start_line", s.start_line}, {"start_col", s.start_col}, {"end_line", s.end_line},
          {"end_col", s.end_col}};
}

std::string render_json(const ScanReport& report, const std::optional<CorpusStats>& stats) {
  json j;
  j["scanned_files"] = report.scanned_files;
  j["parse_failures"] = report.parse_failures;
  j["engine"] = to_string(report.engine);
  j["config_digest"] = report.config_digest;
  j["findings"] = json::array();
  for (const auto& f : report.findings) {
    j["findings"].push_back({{"smell", to_string(f.smell)},
                             {"path", f.path},
                             {"span", span_json(f.span)},
                             {"evidence", f.evidence},
                             {"engine", to_string(f.engine)},
                             {"message", f.message},
                             {"file_level", f.file_level}});
  }
  j["per_file_index"] = json::object();
  for (const auto& [path, ids] : report.per_file_index) {
    auto& arr = j["per_file_index"][path] = json::array();
    for (auto id : ids) arr.push_back(to_string(id));
  }
  if (stats) {
    json p = json::object();
    for (const auto& s : stats->per_smell) {
      p[to_string(s.smell)] = {{"files_affected", s.files_affected},
                               {"numerator", s.fraction.num},
                               {"denominator", s.fraction.den},
                               {"percent", percent_string(s.fraction)}};
    }
    j["prevalence"] = p;
  }
  return j.dump();
}

std::string render_sarif(const ScanReport& report, const Catalog& catalog) {
  json rules = json::array();
  std::map<SmellId, std::size_t> index;
  for (const auto& s : catalog.smells) {
    index[s.id] = rules.size();
    rules.push_back({{"id", to_string(s.id)},
                     {"name", s.name},
                     {"shortDescription", {{"text", s.name}}},
                     {"fullDescription", {{"text", s.summary}}},
                     {"help", {{"text", s.remediation}}},
                     {"properties", {{"category", s.category}}}});
  }
  json results = json::array();
  for (const auto& f : report.findings) {
    json region = {{"startLine", f.span.start_line},
                   {"startColumn", f.span.start_col},
                   {"endLine", f.span.end_line},
                   {"endColumn", f.span.end_col}};
    json result = {{"ruleId", to_string(f.smell)},
                   {"level", "warning"},
                   {"message", {{"text", f.message}}},
                   {"locations",
                    json::array({{{"physicalLocation",
                                   {{"artifactLocation", {{"uri", f.path}}}, {"region", region}}}}})},
                   {"properties", {{"evidence", f.evidence}, {"engine", to_string(f.engine)}}}};
    if (auto it = index.find(f.smell); it != index.end()) result["ruleIndex"] = it->second;
    results.push_back(std::move(result));
  }
  json driver = {{"name", "tfsmell"},
                 {"version", TFSMELL_VERSION},
                 {"semanticVersion", TFSMELL_VERSION},
                 {"rules", rules}};
  json sarif = {{"$schema", "https://json.schemastore.org/sarif-2.1.0.json"},
                {"version", "2.1.0"},
                {"runs", json::array({{{"tool", {{"driver", driver}}}, {"results", results}}})}};
  return sarif.dump();
}

}  // namespace

std::string render(const ScanReport& report, const std::optional<CorpusStats>& stats, ReportFormat format,
                   const Catalog& catalog) {
  switch (format) {
    case ReportFormat::Text:
      return render_text(report, stats, catalog);
    case ReportFormat::Json:
      return render_json(report, stats);
    case ReportFormat::Sarif:
      return render_sarif(report, catalog);
  }
  throw std::invalid_argument("unknown format");
}

}  // namespace tfsmell

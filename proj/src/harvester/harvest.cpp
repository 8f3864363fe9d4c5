#include "tfsmell/harvester.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <fstream>
#include <set>
#include <thread>

namespace tfsmell {

using nlohmann::json;
namespace fs = std::filesystem;

FilterCriteria parse_criteria(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("malformed criteria: ") + e.what());
  }
  if (!j.is_object()) throw std::runtime_error("criteria must be a JSON object");
  FilterCriteria c;
  for (const auto& [key, v] : j.items()) {
    auto need = [&](bool ok) {
      if (!ok) throw std::runtime_error("criteria key '" + key + "' has the wrong type");
    };
    if (key == "min_stars") {
      need(v.is_number_integer());
      c.min_stars = v.get<std::int64_t>();
    } else if (key == "exclude_forks") {
      need(v.is_boolean());
      c.exclude_forks = v.get<bool>();
    } else if (key == "min_size_kb_exclusive") {
      need(v.is_number_integer());
      c.min_size_kb_exclusive = v.get<std::int64_t>();
    } else if (key == "require_public") {
      need(v.is_boolean());
      c.require_public = v.get<bool>();
    } else if (key == "manual_review_content") {
      need(v.is_boolean());
      if (!v.get<bool>()) throw std::runtime_error("manual_review_content cannot be disabled");
    } else {
      throw std::runtime_error("unknown criteria key '" + key + "'");
    }
  }
  return c;
}

FilterResult apply_filters(const std::vector<RepoRecord>& records, const FilterCriteria& criteria) {
  FilterResult out;
  for (const auto& r : records) {
    const char* reason = nullptr;
    if (r.size_kb <= criteria.min_size_kb_exclusive) {
      reason = "size";
    } else if (criteria.exclude_forks && r.is_fork) {
      reason = "fork";
    } else if (r.stars < criteria.min_stars) {
      reason = "min_stars";
    } else if (criteria.require_public && r.visibility != "public") {
      reason = "not_public";
    }
    if (reason) {
      out.rejected.push_back({r, reason});
    } else {
      out.kept.push_back(r);
    }
  }
  return out;
}

namespace {

json record_json(const RepoRecord& r) {
  return {{"full_name", r.full_name},   {"stars", r.stars},
          {"is_fork", r.is_fork},       {"size_kb", r.size_kb},
          {"visibility", r.visibility}, {"provider_tag", std::string(to_string(r.provider_tag))},
          {"retrieved_at", r.retrieved_at}};
}

RepoRecord record_from_json(const json& j) {
  RepoRecord r;
  r.full_name = j.at("full_name").get<std::string>();
  r.stars = j.value("stars", std::int64_t{0});
  r.is_fork = j.value("is_fork", false);
  r.size_kb = j.value("size_kb", std::int64_t{0});
  r.visibility = j.value("visibility", "public");
  r.provider_tag = parse_provider(j.value("provider_tag", "aws"));
  r.retrieved_at = j.value("retrieved_at", "");
  return r;
}

json criteria_json(const FilterCriteria& c) {
  return {{"min_stars", c.min_stars},
          {"exclude_forks", c.exclude_forks},
          {"min_size_kb_exclusive", c.min_size_kb_exclusive},
          {"require_public", c.require_public},
          {"manual_review_content", c.manual_review_content}};
}

std::string entry_line(const ManifestEntry& e) {
  json files = json::array();
  for (const auto& f : e.files) files.push_back({{"path", f.path}, {"sha256", f.sha256}, {"blob_sha", f.blob_sha}});
  return json{{"type", "repo"},
              {"record", record_json(e.record)},
              {"decision", e.decision},
              {"reason", e.reason},
              {"manual_review", e.manual_review},
              {"files", files}}
      .dump();
}

}  // namespace

std::string record_to_json(const RepoRecord& record) { return record_json(record).dump(); }

std::string criteria_to_json(const FilterCriteria& criteria) { return criteria_json(criteria).dump(); }

ManifestWriter::ManifestWriter(const fs::path& path) : path_(path) {
  if (path_.has_parent_path()) fs::create_directories(path_.parent_path());
}

void ManifestWriter::append(const std::string& json_line) {
  std::lock_guard lock(mutex_);
  std::ofstream out(path_, std::ios::binary | std::ios::app);
  out << json_line << '\n';
  if (!out) throw HarvestError("cannot append to " + path_.string());
}

std::vector<ManifestEntry> read_manifest(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw HarvestError("cannot read manifest " + path.string());
  std::map<std::string, ManifestEntry> by_name;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      throw HarvestError(path.string() + ":" + std::to_string(lineno) + ": not a JSON object");
    }
    if (j.value("type", "") != "repo") continue;
    ManifestEntry e;
    try {
      e.record = record_from_json(j.at("record"));
      e.decision = j.value("decision", "");
      e.reason = j.value("reason", "");
      e.manual_review = j.value("manual_review", false);
      for (const auto& f : j.value("files", json::array())) {
        e.files.push_back({f.at("path").get<std::string>(), f.value("sha256", ""), f.value("blob_sha", ""), false});
      }
    } catch (const std::exception& ex) {
      throw HarvestError(path.string() + ":" + std::to_string(lineno) + ": " + ex.what());
    }
    by_name[e.record.full_name] = std::move(e);
  }
  std::vector<ManifestEntry> out;
  for (auto& [_, e] : by_name) out.push_back(std::move(e));
  return out;
}

std::map<std::string, std::vector<std::string>> manifest_file_lists(const std::vector<ManifestEntry>& entries) {
  std::map<std::string, std::vector<std::string>> out;
  for (const auto& e : entries) {
    if (e.decision != "include" || e.files.empty()) continue;
    auto& files = out[e.record.full_name];
    for (const auto& f : e.files) files.push_back(f.path);
  }
  return out;
}

HarvestSummary harvest(GitHubClient& client, const HarvestOptions& options) {
  std::vector<std::string> queries = options.queries;
  if (queries.empty()) queries.push_back(default_query(options.provider));

  std::vector<RepoRecord> records;
  std::set<std::string> seen;
  for (const auto& q : queries) {
    for (auto& r : client.search_repos(options.provider, q)) {
      if (seen.insert(r.full_name).second) records.push_back(std::move(r));
    }
  }
  std::sort(records.begin(), records.end(),
            [](const RepoRecord& a, const RepoRecord& b) { return a.full_name < b.full_name; });

  auto filtered = apply_filters(records, options.criteria);
  HarvestSummary summary;
  summary.found = records.size();
  summary.rejected = filtered.rejected.size();
  for (const auto& r : filtered.rejected) ++summary.rejections[r.reason];
  if (options.dry_run) {
    summary.kept = filtered.kept.size();
    return summary;
  }

  std::vector<ManifestEntry> entries(filtered.kept.size());
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> fatal(std::max(1u, options.jobs));
  auto worker = [&](std::size_t w) {
    try {
      for (std::size_t i = next++; i < filtered.kept.size(); i = next++) {
        auto& e = entries[i];
        e.record = filtered.kept[i];
        e.manual_review = options.criteria.manual_review_content;
        FetchResult fetched;
        try {
          fetched = client.fetch_tf_files(e.record, options.dest);
        } catch (const HttpError& ex) {
          fetched.skip_reason = "http " + std::to_string(ex.status());
        } catch (const NetworkError& ex) {
          fetched.skip_reason = std::string("network: ") + ex.what();
        }
        if (fetched.skip_reason) {
          e.decision = "skip";
          e.reason = *fetched.skip_reason;
        } else {
          e.decision = "include";
          e.reason = "passed automatic criteria";
          e.files = std::move(fetched.files);
        }
        e.manual_review = e.manual_review && e.decision == "include";
      }
    } catch (...) {
      fatal[w] = std::current_exception();
    }
  };
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < fatal.size(); ++w) pool.emplace_back(worker, w);
  }
  for (auto& e : fatal) {
    if (e) std::rethrow_exception(e);
  }

  ManifestWriter writer(options.dest / "manifest.jsonl");
  writer.append(json{{"type", "criteria"},
                     {"provider", std::string(to_string(options.provider))},
                     {"queries", queries},
                     {"criteria", criteria_json(options.criteria)}}
                    .dump());
  for (const auto& r : filtered.rejected) {
    ManifestEntry e{r.record, "reject", r.reason, false, {}};
    writer.append(entry_line(e));
  }
  for (const auto& e : entries) {
    writer.append(entry_line(e));
    if (e.decision == "include") {
      ++summary.kept;
      summary.files += e.files.size();
      for (const auto& f : e.files) (f.downloaded ? summary.downloads : summary.digest_matches)++;
    } else {
      ++summary.skipped;
    }
  }
  writer.append(json{{"type", "totals"},
                     {"provider", std::string(to_string(options.provider))},
                     {"found", summary.found},
                     {"kept", summary.kept},
                     {"rejected", summary.rejected},
                     {"skipped", summary.skipped},
                     {"files", summary.files},
                     {"downloads", summary.downloads},
                     {"digest_matches", summary.digest_matches}}
                    .dump());
  return summary;
}

}  // namespace tfsmell

#include "tfsmell/digest.hpp"
#include "tfsmell/harvester.hpp"

#include <httplib.h>
#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <ctime>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

namespace tfsmell {

using nlohmann::json;
namespace fs = std::filesystem;

std::string_view to_string(Provider provider) {
  switch (provider) {
    case Provider::Aws:
      return "aws";
    case Provider::Azure:
      return "azure";
    case Provider::Gcp:
      return "gcp";
  }
  return "aws";
}

Provider parse_provider(std::string_view text) {
  if (text == "aws") return Provider::Aws;
  if (text == "azure") return Provider::Azure;
  if (text == "gcp") return Provider::Gcp;
  throw std::invalid_argument("unknown provider '" + std::string(text) + "'");
}

std::string default_query(Provider provider) {
  switch (provider) {
    case Provider::Aws:
      return "aws_instance extension:tf";
    case Provider::Azure:
      return "azurerm_ extension:tf";
    case Provider::Gcp:
      return "google_compute_ extension:tf";
  }
  return {};
}

Credentials Credentials::from_env() {
  const char* token = std::getenv(kTokenEnvVar);
  return {token ? std::string(token) : std::string()};
}

std::optional<std::string> HttpResponse::header(const std::string& name) const {
  auto it = headers.find(name);
  if (it == headers.end()) return std::nullopt;
  return it->second;
}

namespace {

std::int64_t system_now() {
  return std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch())
      .count();
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::optional<std::int64_t> header_int(const HttpResponse& r, const std::string& name) {
  auto v = r.header(name);
  if (!v) return std::nullopt;
  try {
    return std::stoll(*v);
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

std::string iso8601(std::int64_t unix_seconds) {
  std::time_t t = static_cast<std::time_t>(unix_seconds);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// "a/../b", absolute paths and empty segments are refused.
bool safe_relative(const std::string& path) {
  if (path.empty() || path.front() == '/') return false;
  std::istringstream in(path);
  std::string seg;
  while (std::getline(in, seg, '/')) {
    if (seg.empty() || seg == "." || seg == "..") return false;
  }
  return path.back() != '/';
}

std::optional<std::string> read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// URL of a Link header entry with rel="next".
std::optional<std::string> next_link(const std::string& link) {
  std::size_t pos = 0;
  while (pos < link.size()) {
    auto open = link.find('<', pos);
    if (open == std::string::npos) break;
    auto close = link.find('>', open);
    if (close == std::string::npos) break;
    auto end = link.find(',', close);
    std::string params = link.substr(close + 1, end == std::string::npos ? std::string::npos : end - close - 1);
    if (params.find("rel=\"next\"") != std::string::npos) return link.substr(open + 1, close - open - 1);
    if (end == std::string::npos) break;
    pos = end + 1;
  }
  return std::nullopt;
}

}  // namespace

void RateGate::acquire(const ClientOptions& options) {
  std::lock_guard lock(mutex_);
  if (!remaining_ || *remaining_ > 0) return;
  auto now = options.now();
  if (reset_at_ > now) options.sleep(std::chrono::seconds(reset_at_ - now));
  remaining_.reset();
  reset_at_ = 0;
}

void RateGate::update(const HttpResponse& response) {
  std::lock_guard lock(mutex_);
  if (auto v = header_int(response, "x-ratelimit-remaining")) remaining_ = *v;
  if (auto v = header_int(response, "x-ratelimit-reset")) reset_at_ = *v;
}

void RateGate::block_until(std::int64_t unix_seconds) {
  std::lock_guard lock(mutex_);
  remaining_ = 0;
  reset_at_ = std::max(reset_at_, unix_seconds);
}

GitHubClient::GitHubClient(Credentials credentials, ClientOptions options)
    : credentials_(std::move(credentials)), options_(std::move(options)) {
  if (!options_.now) options_.now = system_now;
  if (!options_.sleep) options_.sleep = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  if (options_.per_page < 1 || options_.per_page > 100) throw std::invalid_argument("per_page must be in [1, 100]");
  auto scheme = options_.base_url.find("://");
  if (scheme == std::string::npos) throw std::invalid_argument("base URL needs a scheme: " + options_.base_url);
  auto slash = options_.base_url.find('/', scheme + 3);
  scheme_host_ = options_.base_url.substr(0, slash);
  if (slash != std::string::npos) path_prefix_ = options_.base_url.substr(slash);
  while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
}

HttpResponse GitHubClient::get(const std::string& target, const std::map<std::string, std::string>& extra) {
  for (int attempt = 0;; ++attempt) {
    gate_.acquire(options_);

    httplib::Client cli(scheme_host_);
    cli.set_connection_timeout(options_.timeout);
    cli.set_read_timeout(options_.timeout);
    cli.set_follow_location(true);
    httplib::Headers headers{{"Accept", "application/vnd.github+json"},
                             {"User-Agent", "tfsmell/" TFSMELL_VERSION},
                             {"X-GitHub-Api-Version", "2022-11-28"}};
    if (!credentials_.token.empty()) headers.emplace("Authorization", "Bearer " + credentials_.token);
    for (const auto& [k, v] : extra) {
      headers.erase(k);
      headers.emplace(k, v);
    }
    auto result = cli.Get(path_prefix_ + target, headers);
    if (!result) throw NetworkError("GET " + target + ": " + httplib::to_string(result.error()));

    HttpResponse res;
    res.status = result->status;
    res.body = result->body;
    for (const auto& [k, v] : result->headers) res.headers.emplace(lower(k), v);
    gate_.update(res);

    if (res.status == 401) throw AuthError("GET " + target + ": bad credentials");
    if (res.status == 403 || res.status == 429) {
      auto retry_after = header_int(res, "retry-after");
      auto remaining = header_int(res, "x-ratelimit-remaining");
      if (res.status == 403 && !retry_after && remaining != 0) {
        throw AuthError("GET " + target + ": forbidden");
      }
      std::int64_t now = options_.now();
      std::int64_t wait = 60;
      if (retry_after) {
        wait = *retry_after;
      } else if (auto reset = header_int(res, "x-ratelimit-reset")) {
        wait = *reset - now;
      }
      wait = std::max<std::int64_t>(wait, 0);
      if (attempt >= options_.max_retries || wait > options_.max_wait.count()) {
        throw RateLimitError("GET " + target + ": rate limit exhausted (retry in " + std::to_string(wait) + "s)");
      }
      gate_.block_until(now + wait);
      continue;
    }
    if (res.status == 404 || (res.status >= 200 && res.status < 300)) return res;
    throw HttpError(res.status, "GET " + target + ": HTTP " + std::to_string(res.status));
  }
}

std::vector<RepoRecord> GitHubClient::search_repos(Provider provider, const std::string& query) {
  std::vector<RepoRecord> out;
  std::set<std::string> seen;
  std::string target = "/search/code?q=" + httplib::detail::encode_query_param(query) +
                       "&per_page=" + std::to_string(options_.per_page) + "&page=1";
  int page = 1;
  while (!target.empty()) {
    json body;
    std::optional<std::string> link;
    for (int attempt = 0;; ++attempt) {
      auto res = get(target);
      link = res.header("link");
      if (res.status == 404) throw HttpError(404, "GET " + target + ": not found");
      try {
        body = json::parse(res.body);
      } catch (const json::parse_error& e) {
        throw HarvestError("GET " + target + ": malformed response: " + e.what());
      }
      if (!body.value("incomplete_results", false)) break;
      // An incomplete page would silently drop results.
      if (attempt >= options_.max_retries) throw HarvestError("GET " + target + ": results stay incomplete");
    }
    const json items = body.value("items", json::array());
    for (const auto& item : items) {
      const json& repo = item.contains("repository") ? item["repository"] : item;
      std::string name = repo.value("full_name", "");
      if (name.empty() || !seen.insert(name).second) continue;
      json details = repo;
      if (!details.contains("stargazers_count") || !details.contains("size")) {
        auto res = get("/repos/" + name);
        if (res.status == 404) continue;
        details = json::parse(res.body);
      }
      RepoRecord r;
      r.full_name = name;
      r.stars = details.value("stargazers_count", std::int64_t{0});
      r.is_fork = details.value("fork", false);
      r.size_kb = details.value("size", std::int64_t{0});
      if (details.contains("visibility")) {
        r.visibility = details["visibility"] == "public" ? "public" : "other";
      } else {
        r.visibility = details.value("private", false) ? "other" : "public";
      }
      r.provider_tag = provider;
      r.retrieved_at = iso8601(options_.now());
      out.push_back(std::move(r));
    }

    target.clear();
    ++page;
    // Link header when present, otherwise a full page implies another one.
    if (link) {
      if (auto next = next_link(*link)) {
        auto scheme = next->find("://");
        auto path = scheme == std::string::npos ? *next : next->substr(next->find('/', scheme + 3));
        if (path.starts_with(path_prefix_)) path = path.substr(path_prefix_.size());
        target = path;
      }
    } else if (items.size() == static_cast<std::size_t>(options_.per_page)) {
      target = "/search/code?q=" + httplib::detail::encode_query_param(query) +
               "&per_page=" + std::to_string(options_.per_page) + "&page=" + std::to_string(page);
    }
  }
  return out;
}

FetchResult GitHubClient::fetch_tf_files(const RepoRecord& record, const fs::path& dest) {
  FetchResult out;
  HttpResponse tree_res;
  try {
    tree_res = get("/repos/" + record.full_name + "/git/trees/HEAD?recursive=1");
  } catch (const HttpError& e) {
    // 409: repository without commits; 451: blocked for legal reasons.
    if (e.status() != 409 && e.status() != 451) throw;
    out.skip_reason = e.status() == 409 ? "empty" : "blocked";
    return out;
  }
  if (tree_res.status == 404) {
    out.skip_reason = "gone";
    return out;
  }
  json tree = json::parse(tree_res.body, nullptr, false);
  if (tree.is_discarded() || !tree.contains("tree")) throw HarvestError(record.full_name + ": malformed tree");
  if (tree.value("truncated", false)) {
    out.skip_reason = "truncated";
    return out;
  }

  std::vector<std::pair<std::string, std::string>> blobs;  // path, sha
  for (const auto& entry : tree["tree"]) {
    if (entry.value("type", "") != "blob") continue;
    std::string path = entry.value("path", "");
    if (!path.ends_with(".tf") || !safe_relative(path)) continue;
    blobs.emplace_back(path, entry.value("sha", ""));
  }
  std::sort(blobs.begin(), blobs.end());

  const fs::path root = dest / record.full_name;
  for (const auto& [path, sha] : blobs) {
    const fs::path local = root / path;
    FetchedFile f;
    f.path = path;
    if (auto existing = read_file(local); existing && git_blob_sha(*existing) == sha) {
      f.sha256 = sha256_hex(*existing);
      f.blob_sha = sha;
      ++out.digest_matches;
      out.files.push_back(std::move(f));
      continue;
    }
    auto res = get("/repos/" + record.full_name + "/contents/" + httplib::detail::encode_url(path),
                   {{"Accept", "application/vnd.github.raw+json"}});
    if (res.status == 404) {
      out.files.clear();
      out.skip_reason = "gone";
      return out;
    }
    fs::create_directories(local.parent_path());
    std::ofstream file(local, std::ios::binary | std::ios::trunc);
    file << res.body;
    if (!file) throw HarvestError("cannot write " + local.string());
    f.sha256 = sha256_hex(res.body);
    f.blob_sha = git_blob_sha(res.body);
    f.downloaded = true;
    ++out.downloads;
    out.files.push_back(std::move(f));
  }
  return out;
}

}  // namespace tfsmell

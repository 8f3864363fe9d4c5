#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tfsmell {

enum class Provider : std::uint8_t { Aws, Azure, Gcp };

std::string_view to_string(Provider provider);
Provider parse_provider(std::string_view text);

/// Search string used when no query is configured for the provider.
std::string default_query(Provider provider);

struct RepoRecord {
  std::string full_name;
  std::int64_t stars = 0;
  bool is_fork = false;
  std::int64_t size_kb = 0;
  std::string visibility = "public";  // "public" or "other"
  Provider provider_tag = Provider::Aws;
  std::string retrieved_at;  // ISO 8601, UTC
};

struct FilterCriteria {
  std::int64_t min_stars = 2;
  bool exclude_forks = true;
  std::int64_t min_size_kb_exclusive = 0;
  bool require_public = true;
  // Kept records are always queued for a manual content review.
  bool manual_review_content = true;
};

/// Strict JSON reader for FilterCriteria; absent keys keep their defaults.
/// Throws std::runtime_error on unknown keys or wrong types.
FilterCriteria parse_criteria(std::string_view json_text);

struct Rejection {
  RepoRecord record;
  std::string reason;  // "size", "fork", "min_stars" or "not_public"
};

struct FilterResult {
  std::vector<RepoRecord> kept;
  std::vector<Rejection> rejected;
};

/// Criteria are checked in the order size, fork, stars, visibility; a
/// rejection names the first one that fails.
FilterResult apply_filters(const std::vector<RepoRecord>& records, const FilterCriteria& criteria);

class HarvestError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class AuthError : public HarvestError {
 public:
  using HarvestError::HarvestError;
};
class RateLimitError : public HarvestError {
 public:
  using HarvestError::HarvestError;
};
class NetworkError : public HarvestError {
 public:
  using HarvestError::HarvestError;
};
class HttpError : public HarvestError {
 public:
  HttpError(int status, const std::string& message) : HarvestError(message), status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

/// Token read from this environment variable when none is given explicitly.
inline constexpr const char* kTokenEnvVar = "GITHUB_TOKEN";

struct Credentials {
  std::string token;

  static Credentials from_env();
};

struct ClientOptions {
  std::string base_url = "https://api.github.com";
  int per_page = 100;
  int max_retries = 5;
  // A rate-limit wait longer than this is reported as an exhausted budget.
  std::chrono::seconds max_wait{3600};
  std::chrono::seconds timeout{30};
  // Unix time in seconds; injectable for tests.
  std::function<std::int64_t()> now;
  std::function<void(std::chrono::milliseconds)> sleep;
};

struct HttpResponse {
  int status = 0;
  std::string body;
  std::multimap<std::string, std::string> headers;  // lowercase names

  std::optional<std::string> header(const std::string& name) const;
};

/// Shared request budget. Callers block while the budget is spent and the
/// reset time lies in the future.
class RateGate {
 public:
  void acquire(const ClientOptions& options);
  void update(const HttpResponse& response);
  void block_until(std::int64_t unix_seconds);

 private:
  std::mutex mutex_;
  std::optional<std::int64_t> remaining_;
  std::int64_t reset_at_ = 0;
};

struct FetchedFile {
  std::string path;  // repository-relative
  std::string sha256;
  std::string blob_sha;
  bool downloaded = false;
};

struct FetchResult {
  std::vector<FetchedFile> files;
  std::size_t downloads = 0;
  std::size_t digest_matches = 0;
  std::optional<std::string> skip_reason;
};

class GitHubClient {
 public:
  GitHubClient(Credentials credentials, ClientOptions options = {});

  /// GET with header-driven backoff on 403/429 rate-limit responses.
  /// Throws AuthError, RateLimitError, NetworkError or HttpError (other
  /// non-2xx statuses, except 404 which is returned to the caller).
  HttpResponse get(const std::string& target, const std::map<std::string, std::string>& headers = {});

  /// Drains every result page of a code search and returns the distinct
  /// repositories in first-seen order.
  std::vector<RepoRecord> search_repos(Provider provider, const std::string& query);

  /// Downloads every `*.tf` blob of the default branch into
  /// dest/<full_name>/<path>. Files whose local content already has the
  /// remote blob digest are not downloaded again. A vanished repository
  /// yields skip_reason "gone".
  FetchResult fetch_tf_files(const RepoRecord& record, const std::filesystem::path& dest);

  const ClientOptions& options() const { return options_; }
  RateGate& gate() { return gate_; }

 private:
  Credentials credentials_;
  ClientOptions options_;
  RateGate gate_;
  std::string scheme_host_;
  std::string path_prefix_;
};

/// Manifest lines are JSON objects with a "type" of "criteria", "repo" or
/// "totals". The writer only appends and serializes concurrent callers.
class ManifestWriter {
 public:
  explicit ManifestWriter(const std::filesystem::path& path);
  void append(const std::string& json_line);

 private:
  std::mutex mutex_;
  std::filesystem::path path_;
};

struct ManifestEntry {
  RepoRecord record;
  std::string decision;  // "include", "reject" or "skip"
  std::string reason;
  bool manual_review = false;
  std::vector<FetchedFile> files;
};

/// Repo entries of a manifest; later lines for the same repository win.
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);

/// repository -> included file paths, for the sampler.
std::map<std::string, std::vector<std::string>> manifest_file_lists(const std::vector<ManifestEntry>& entries);

struct HarvestOptions {
  Provider provider = Provider::Aws;
  std::vector<std::string> queries;  // empty = default_query(provider)
  FilterCriteria criteria;
  std::filesystem::path dest;
  bool dry_run = false;  // search and filter only; no downloads, no manifest
  unsigned jobs = 4;
};

struct HarvestSummary {
  std::size_t found = 0;
  std::size_t kept = 0;
  std::size_t rejected = 0;
  std::size_t skipped = 0;
  std::size_t files = 0;
  std::size_t downloads = 0;
  std::size_t digest_matches = 0;
  std::map<std::string, std::size_t> rejections;  // reason -> count
};

/// Search, filter, fetch and record into dest/manifest.jsonl.
HarvestSummary harvest(GitHubClient& client, const HarvestOptions& options);

std::string record_to_json(const RepoRecord& record);
std::string criteria_to_json(const FilterCriteria& criteria);

}  // namespace tfsmell

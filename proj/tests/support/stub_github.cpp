#include "stub_github.hpp"

#include "tfsmell/digest.hpp"

#include <httplib.h>
#include <json.hpp>

#include <algorithm>
#include <stdexcept>

namespace tfsmell::testing {

using nlohmann::json;

namespace {

void send_json(httplib::Response& res, const json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

}  // namespace

StubGitHub::StubGitHub(std::string token) : token_(std::move(token)), server_(std::make_unique<httplib::Server>()) {
  auto& svr = *server_;

  svr.set_pre_routing_handler([this](const httplib::Request& req, httplib::Response& res) {
    std::lock_guard lock(mutex_);
    log_.push_back(req.path);
    auth_.push_back(req.get_header_value("Authorization"));
    if (req.get_header_value("Authorization") != "Bearer " + token_) {
      send_json(res, {{"message", "Bad credentials"}}, 401);
      return httplib::Server::HandlerResponse::Handled;
    }
    if (limited_403_ > 0) {
      --limited_403_;
      res.set_header("X-RateLimit-Remaining", "0");
      res.set_header("X-RateLimit-Reset", std::to_string(reset_403_));
      send_json(res, {{"message", "API rate limit exceeded"}}, 403);
      return httplib::Server::HandlerResponse::Handled;
    }
    if (limited_429_ > 0) {
      --limited_429_;
      res.set_header("Retry-After", std::to_string(retry_after_));
      send_json(res, {{"message", "secondary rate limit"}}, 429);
      return httplib::Server::HandlerResponse::Handled;
    }
    if (budget_) {
      res.set_header("X-RateLimit-Remaining", std::to_string(budget_->first));
      res.set_header("X-RateLimit-Reset", std::to_string(budget_->second));
    }
    return httplib::Server::HandlerResponse::Unhandled;
  });

  svr.Get("/search/code", [this](const httplib::Request& req, httplib::Response& res) {
    std::string q = req.get_param_value("q");
    int per_page = req.has_param("per_page") ? std::stoi(req.get_param_value("per_page")) : 30;
    int page = req.has_param("page") ? std::stoi(req.get_param_value("page")) : 1;
    std::vector<std::string> hits;
    {
      std::lock_guard lock(mutex_);
      if (auto it = hits_.find(q); it != hits_.end()) hits = it->second;
    }
    auto from = std::min(hits.size(), static_cast<std::size_t>((page - 1) * per_page));
    auto to = std::min(hits.size(), from + static_cast<std::size_t>(per_page));
    json items = json::array();
    for (auto i = from; i < to; ++i) {
      items.push_back({{"name", "main.tf"}, {"path", "main.tf"}, {"repository", {{"full_name", hits[i]}}}});
    }
    bool incomplete = false;
    if (incomplete_ > 0) {
      --incomplete_;
      incomplete = true;
    }
    if (link_headers_ && to < hits.size()) {
      auto url = [&](int p) {
        return base_url() + "/search/code?q=" + httplib::detail::encode_query_param(q) +
               "&per_page=" + std::to_string(per_page) + "&page=" + std::to_string(p);
      };
      int last = static_cast<int>((hits.size() + per_page - 1) / per_page);
      res.set_header("Link", "<" + url(page + 1) + ">; rel=\"next\", <" + url(last) + ">; rel=\"last\"");
    }
    send_json(res, {{"total_count", hits.size()}, {"incomplete_results", incomplete}, {"items", items}});
  });

  svr.Get(R"(/repos/([^/]+)/([^/]+)/git/trees/HEAD)", [this](const httplib::Request& req, httplib::Response& res) {
    std::lock_guard lock(mutex_);
    auto it = repos_.find(req.matches[1].str() + "/" + req.matches[2].str());
    if (it == repos_.end()) return send_json(res, {{"message", "Not Found"}}, 404);
    const Repo& r = it->second;
    if (r.tree_status != 200) return send_json(res, {{"message", "unavailable"}}, r.tree_status);
    json tree = json::array();
    std::set<std::string> dirs;
    for (const auto& [path, content] : r.files) {
      for (auto slash = path.find('/'); slash != std::string::npos; slash = path.find('/', slash + 1)) {
        dirs.insert(path.substr(0, slash));
      }
      tree.push_back({{"path", path}, {"type", "blob"}, {"sha", git_blob_sha(content)}, {"size", content.size()}});
    }
    for (const auto& d : dirs) tree.push_back({{"path", d}, {"type", "tree"}, {"sha", sha256_hex(d).substr(0, 40)}});
    send_json(res, {{"sha", "head"}, {"tree", tree}, {"truncated", r.truncated}});
  });

  svr.Get(R"(/repos/([^/]+)/([^/]+)/contents/(.+))", [this](const httplib::Request& req, httplib::Response& res) {
    std::lock_guard lock(mutex_);
    auto it = repos_.find(req.matches[1].str() + "/" + req.matches[2].str());
    std::string path = req.matches[3].str();
    if (it == repos_.end() || it->second.vanished.contains(path) || !it->second.files.contains(path)) {
      return send_json(res, {{"message", "Not Found"}}, 404);
    }
    if (req.get_header_value("Accept") != "application/vnd.github.raw+json") {
      return send_json(res, {{"message", "expected raw media type"}}, 415);
    }
    res.set_content(it->second.files.at(path), "application/vnd.github.raw");
  });

  svr.Get(R"(/repos/([^/]+)/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    std::lock_guard lock(mutex_);
    std::string name = req.matches[1].str() + "/" + req.matches[2].str();
    auto it = repos_.find(name);
    if (it == repos_.end()) return send_json(res, {{"message", "Not Found"}}, 404);
    const Repo& r = it->second;
    send_json(res, {{"full_name", name},
                    {"stargazers_count", r.stars},
                    {"fork", r.fork},
                    {"size", r.size_kb},
                    {"private", r.is_private},
                    {"visibility", r.is_private ? "private" : "public"}});
  });

  port_ = svr.bind_to_any_port("127.0.0.1");
  if (port_ <= 0) throw std::runtime_error("stub server could not bind");
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
}

StubGitHub::~StubGitHub() {
  server_->stop();
  if (thread_.joinable()) thread_.join();
}

std::string StubGitHub::base_url() const { return "http://127.0.0.1:" + std::to_string(port_); }

void StubGitHub::add_repo(const std::string& full_name, Repo repo) {
  std::lock_guard lock(mutex_);
  repos_[full_name] = std::move(repo);
}

StubGitHub::Repo& StubGitHub::repo(const std::string& full_name) {
  std::lock_guard lock(mutex_);
  return repos_.at(full_name);
}

void StubGitHub::set_hits(const std::string& query, std::vector<std::string> repos) {
  std::lock_guard lock(mutex_);
  hits_[query] = std::move(repos);
}

void StubGitHub::rate_limit_403(int count, std::int64_t reset) {
  std::lock_guard lock(mutex_);
  limited_403_ = count;
  reset_403_ = reset;
}

void StubGitHub::rate_limit_429(int count, int retry_after_seconds) {
  std::lock_guard lock(mutex_);
  limited_429_ = count;
  retry_after_ = retry_after_seconds;
}

void StubGitHub::set_budget(std::int64_t remaining, std::int64_t reset) {
  std::lock_guard lock(mutex_);
  budget_ = std::make_pair(remaining, reset);
}

std::size_t StubGitHub::requests(const std::string& needle) const {
  std::lock_guard lock(mutex_);
  return static_cast<std::size_t>(
      std::count_if(log_.begin(), log_.end(), [&](const std::string& p) { return p.find(needle) != std::string::npos; }));
}

std::vector<std::string> StubGitHub::authorizations() const {
  std::lock_guard lock(mutex_);
  return auth_;
}

void FakeClock::install(ClientOptions& options) {
  options.now = [this] { return now.load(); };
  options.sleep = [this](std::chrono::milliseconds d) {
    std::lock_guard lock(mutex);
    sleeps.push_back(d);
    now += std::chrono::duration_cast<std::chrono::seconds>(d).count();
  };
}

}  // namespace tfsmell::testing

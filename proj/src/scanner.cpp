#include "tfsmell/scanner.hpp"

#include "tfsmell/config.hpp"
#include "tfsmell/hcl/parser.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace tfsmell {

namespace fs = std::filesystem;

namespace {

std::optional<std::string> read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) return std::nullopt;
  return buf.str();
}

bool is_tf(const fs::path& p) { return p.extension() == ".tf"; }

std::string parent_of(const std::string& path) {
  auto slash = path.rfind('/');
  return slash == std::string::npos ? std::string(".") : path.substr(0, slash);
}

// Runs fn(i) for every i in order, spread over `jobs` threads.
template <typename Fn>
void parallel_for(const std::vector<std::size_t>& order, unsigned jobs, Fn fn) {
  if (jobs <= 1 || order.size() <= 1) {
    for (auto i : order) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(jobs);
  std::vector<std::jthread> pool;
  for (unsigned w = 0; w < jobs; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t k = next++; k < order.size(); k = next++) fn(order[k]);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  pool.clear();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::vector<std::size_t> dispatch_order(std::size_t n, const std::optional<std::uint64_t>& seed) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  if (seed) {
    std::mt19937_64 gen(*seed);
    std::shuffle(order.begin(), order.end(), gen);
  }
  return order;
}

}  // namespace

std::vector<SourceFile> collect_sources(const fs::path& root) {
  std::error_code ec;
  auto status = fs::symlink_status(root, ec);
  if (ec || !fs::exists(status)) throw std::runtime_error("cannot read '" + root.string() + "': no such path");
  std::vector<SourceFile> out;
  if (fs::is_regular_file(status)) {
    out.push_back({root.filename().generic_string(), read_file(root)});
    return out;
  }
  if (!fs::is_directory(status)) throw std::runtime_error("cannot read '" + root.string() + "': not a directory");

  fs::recursive_directory_iterator it(root, fs::directory_options::none, ec);
  if (ec) throw std::runtime_error("cannot list '" + root.string() + "': " + ec.message());
  for (; it != fs::recursive_directory_iterator(); it.increment(ec)) {
    if (ec) throw std::runtime_error("cannot list '" + root.string() + "': " + ec.message());
    auto st = it->symlink_status(ec);
    if (ec || fs::is_symlink(st)) {
      ec.clear();
      continue;
    }
    if (!fs::is_regular_file(st) || !is_tf(it->path())) continue;
    out.push_back({fs::relative(it->path(), root).generic_string(), read_file(it->path())});
  }
  std::sort(out.begin(), out.end(), [](const SourceFile& a, const SourceFile& b) { return a.path < b.path; });
  return out;
}

ScanReport scan_sources(std::vector<SourceFile> files, const DetectorConfig& cfg, const ScanOptions& options) {
  std::sort(files.begin(), files.end(), [](const SourceFile& a, const SourceFile& b) { return a.path < b.path; });

  ScanReport report;
  report.engine = options.engine;
  report.config_digest = config_digest(cfg);
  report.scanned_files = files.size();

  std::vector<std::optional<hcl::ConfigFile>> parsed(files.size());
  parallel_for(dispatch_order(files.size(), options.shuffle_seed), options.jobs, [&](std::size_t i) {
    if (files[i].content) parsed[i] = hcl::parse(*files[i].content, files[i].path);
  });

  std::map<std::string, SourceDirectory> by_dir;
  for (std::size_t i = 0; i < files.size(); ++i) {
    if (!parsed[i] || parsed[i]->has_errors()) ++report.parse_failures;
    if (!parsed[i]) continue;
    auto dir = parent_of(files[i].path);
    auto& d = by_dir[dir];
    d.path = dir;
    d.files.push_back(std::move(*parsed[i]));
  }

  std::vector<SourceDirectory*> dirs;
  for (auto& [_, d] : by_dir) dirs.push_back(&d);
  std::vector<std::vector<SmellFinding>> found(dirs.size());
  parallel_for(dispatch_order(dirs.size(), options.shuffle_seed), options.jobs,
               [&](std::size_t i) { found[i] = detect_directory(*dirs[i], cfg, options.engine); });

  for (auto& batch : found) {
    for (auto& f : batch) {
      report.per_file_index[f.path].insert(f.smell);
      report.findings.push_back(std::move(f));
    }
  }
  std::sort(report.findings.begin(), report.findings.end(), finding_less);
  return report;
}

ScanReport scan(const fs::path& root, const DetectorConfig& cfg, const ScanOptions& options) {
  return scan_sources(collect_sources(root), cfg, options);
}

Rational make_rational(std::uint64_t num, std::uint64_t den) {
  if (den == 0) throw std::invalid_argument("zero denominator");
  auto g = std::gcd(num, den);
  return {num / g, den / g};
}

std::string percent_string(const Rational& r) {
  // hundredths of a percent, rounded half up
  std::uint64_t h = (r.num * 20000 + r.den) / (2 * r.den);
  std::string frac = std::to_string(h % 100);
  if (frac.size() < 2) frac.insert(0, "0");
  return std::to_string(h / 100) + "." + frac;
}

const SmellPrevalence* CorpusStats::find(SmellId id) const {
  for (const auto& p : per_smell) {
    if (p.smell == id) return &p;
  }
  return nullptr;
}

CorpusStats prevalence(const ScanReport& report, const Catalog& catalog) {
  if (report.scanned_files == 0) throw std::invalid_argument("prevalence is undefined for an empty scan");
  CorpusStats stats;
  stats.scanned_files = report.scanned_files;
  for (const auto& smell : catalog.smells) {
    std::size_t n = 0;
    for (const auto& [_, ids] : report.per_file_index) n += ids.contains(smell.id) ? 1 : 0;
    stats.per_smell.push_back({smell.id, n, make_rational(n, report.scanned_files)});
  }
  return stats;
}

}  // namespace tfsmell

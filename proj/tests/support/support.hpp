#pragma once

#include "tfsmell/catalog.hpp"
#include "tfsmell/scanner.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace tfsmell::testing {

std::filesystem::path fixtures();

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

/// smell -> indices of the files that carry it.
using PlantPlan = std::map<SmellId, std::set<std::size_t>>;

/// `total` files, each alone in its own directory "dNNN/main.tf". A file
/// carries exactly the smells the plan assigns to its index.
std::vector<SourceFile> synthetic_corpus(std::size_t total, const PlantPlan& plan);

void write_corpus(const std::filesystem::path& root, const std::vector<SourceFile>& files);

/// Plan with `count` distinct files per smell drawn from `total`, seeded.
PlantPlan random_plan(std::size_t total, const std::map<SmellId, std::size_t>& counts, std::uint64_t seed);

/// Top-level HCL items with "{}" placeholders for a unique suffix; each
/// parses to exactly one top-level node.
const std::vector<std::string>& block_pool();
std::string instantiate(std::string tmpl, std::size_t n);

}  // namespace tfsmell::testing

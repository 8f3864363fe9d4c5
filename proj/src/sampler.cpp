#include "tfsmell/scanner.hpp"

#include <algorithm>
#include <limits>
#include <random>
#include <stdexcept>

namespace tfsmell {

std::size_t SampleSet::total() const {
  std::size_t n = 0;
  for (const auto& [_, files] : selections) n += files.size();
  return n;
}

namespace {

// Uniform integer in [0, bound) by rejection; independent of the standard
// library's distribution implementation.
std::uint64_t draw(std::mt19937_64& gen, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = gen();
  } while (x >= limit);
  return x % bound;
}

}  // namespace

SampleSet sample_stratified(const std::map<std::string, std::vector<std::string>>& manifest, std::uint64_t seed) {
  if (manifest.empty()) throw std::invalid_argument("sampling needs at least one repository");
  SampleSet out;
  out.seed = seed;
  std::mt19937_64 gen(seed);
  for (const auto& [repo, listed] : manifest) {
    std::vector<std::string> files(listed);
    std::sort(files.begin(), files.end());
    files.erase(std::unique(files.begin(), files.end()), files.end());
    std::size_t k = files.size();
    if (k > 4) k = 4 + draw(gen, 2);
    for (std::size_t i = 0; i < k && files.size() > 4; ++i) {
      std::swap(files[i], files[i + draw(gen, files.size() - i)]);
    }
    files.resize(k);
    std::sort(files.begin(), files.end());
    out.selections[repo] = std::move(files);
  }
  return out;
}

}  // namespace tfsmell

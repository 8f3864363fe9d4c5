#include "tfsmell/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

namespace tfsmell {

namespace {

constexpr double kTieEpsilon = 1e-12;

}  // namespace

DistanceMatrix DistanceMatrix::from_rows(std::vector<SmellId> ids,
                                         const std::vector<std::vector<double>>& rows) {
  if (rows.size() != ids.size()) {
    throw std::invalid_argument("distance matrix has " + std::to_string(rows.size()) +
                                " rows for " + std::to_string(ids.size()) + " ids");
  }
  DistanceMatrix m;
  m.ids = std::move(ids);
  m.entries.reserve(rows.size() * rows.size());
  for (const auto& row : rows) {
    if (row.size() != rows.size()) throw std::invalid_argument("distance matrix is not square");
    m.entries.insert(m.entries.end(), row.begin(), row.end());
  }
  return m;
}

DistanceMatrix distance_matrix(const SimilarityMatrix& sim) {
  DistanceMatrix d;
  d.ids = sim.ids;
  d.entries.reserve(sim.entries.size());
  for (int s : sim.entries) d.entries.push_back(1.0 - s);
  return d;
}

std::string_view to_string(Linkage linkage) {
  switch (linkage) {
    case Linkage::Single: return "single";
    case Linkage::Complete: return "complete";
    case Linkage::Average: return "average";
  }
  return "average";
}

Linkage parse_linkage(std::string_view text) {
  if (text == "single") return Linkage::Single;
  if (text == "complete") return Linkage::Complete;
  if (text == "average") return Linkage::Average;
  throw std::invalid_argument("unknown linkage '" + std::string(text) + "'");
}

Dendrogram agglomerate(const DistanceMatrix& distances, Linkage linkage) {
  const std::size_t n = distances.size();
  if (distances.entries.size() != n * n) throw std::invalid_argument("distance matrix is not square");
  for (std::size_t i = 0; i < n; ++i) {
    if (distances.at(i, i) != 0.0) throw std::invalid_argument("distance matrix diagonal must be zero");
    for (std::size_t j = i + 1; j < n; ++j) {
      if (distances.at(i, j) != distances.at(j, i)) {
        throw std::invalid_argument("distance matrix is not symmetric");
      }
    }
  }

  struct Cluster {
    std::size_t node;
    std::size_t min_leaf;
    std::vector<std::size_t> members;
  };
  std::vector<Cluster> active;
  for (std::size_t i = 0; i < n; ++i) active.push_back({i, i, {i}});

  // Linkage is recomputed from leaf distances each round; n is tiny.
  auto link = [&](const Cluster& a, const Cluster& b) {
    double best = linkage == Linkage::Single ? std::numeric_limits<double>::infinity() : 0.0;
    double sum = 0.0;
    for (std::size_t x : a.members) {
      for (std::size_t y : b.members) {
        double d = distances.at(x, y);
        switch (linkage) {
          case Linkage::Single: best = std::min(best, d); break;
          case Linkage::Complete: best = std::max(best, d); break;
          case Linkage::Average: sum += d; break;
        }
      }
    }
    if (linkage == Linkage::Average) {
      return sum / static_cast<double>(a.members.size() * b.members.size());
    }
    return best;
  };

  Dendrogram out;
  out.leaves = distances.ids;
  std::size_t next_node = n;
  while (active.size() > 1) {
    std::size_t best_a = 0;
    std::size_t best_b = 0;
    double best_d = std::numeric_limits<double>::infinity();
    std::pair<std::size_t, std::size_t> best_key{n, n};
    for (std::size_t a = 0; a < active.size(); ++a) {
      for (std::size_t b = a + 1; b < active.size(); ++b) {
        double d = link(active[a], active[b]);
        std::pair<std::size_t, std::size_t> key = std::minmax(active[a].min_leaf, active[b].min_leaf);
        bool closer = d < best_d - kTieEpsilon;
        bool tie = std::abs(d - best_d) <= kTieEpsilon && key < best_key;
        if (closer || tie) {
          best_d = d;
          best_a = a;
          best_b = b;
          best_key = key;
        }
      }
    }
    if (active[best_b].min_leaf < active[best_a].min_leaf) std::swap(best_a, best_b);
    Cluster left = active[best_a];
    Cluster right = active[best_b];
    out.merges.push_back({left.node, right.node, best_d, left.members.size() + right.members.size()});

    Cluster merged{next_node++, std::min(left.min_leaf, right.min_leaf), left.members};
    merged.members.insert(merged.members.end(), right.members.begin(), right.members.end());
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(std::max(best_a, best_b)));
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(std::min(best_a, best_b)));
    active.push_back(std::move(merged));
  }
  return out;
}

int ClusterAssignment::label_of(SmellId id) const {
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    if (leaves[i] == id) return labels[i];
  }
  return 0;
}

ClusterAssignment cut(const Dendrogram& dendrogram, double threshold) {
  const std::size_t n = dendrogram.leaves.size();
  // Union-find over node ids.
  std::vector<std::size_t> parent(n + dendrogram.merges.size());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t k = 0; k < dendrogram.merges.size(); ++k) {
    const Merge& m = dendrogram.merges[k];
    std::size_t node = n + k;
    // Internal nodes always exist so later merges can refer to them; they
    // only join their children when the merge is below the threshold.
    if (m.distance < threshold) {
      parent[find(m.left)] = node;
      parent[find(m.right)] = node;
    }
  }

  ClusterAssignment out;
  out.leaves = dendrogram.leaves;
  out.labels.assign(n, 0);
  std::map<std::size_t, int> root_label;
  for (std::size_t leaf = 0; leaf < n; ++leaf) {
    auto [it, inserted] = root_label.emplace(find(leaf), static_cast<int>(root_label.size()) + 1);
    out.labels[leaf] = it->second;
  }
  out.num_clusters = static_cast<int>(root_label.size());
  return out;
}

ClusterAssignment categorize(const std::vector<SmellDescriptor>& smells, Linkage linkage) {
  ClusterAssignment raw = cut(agglomerate(distance_matrix(similarity_matrix(smells)), linkage), 0.5);

  std::map<int, int> relabel;
  auto pin = [&](SmellId anchor, int category) {
    int label = raw.label_of(anchor);
    if (label != 0 && !relabel.contains(label)) relabel[label] = category;
  };
  pin(SS3, static_cast<int>(Category::General));
  pin(SS1, static_cast<int>(Category::Demand));
  pin(SS5, static_cast<int>(Category::Application));

  // Remaining clusters in order of their smallest member id.
  std::vector<std::pair<SmellId, int>> rest;
  for (std::size_t i = 0; i < raw.leaves.size(); ++i) {
    if (!relabel.contains(raw.labels[i])) rest.emplace_back(raw.leaves[i], raw.labels[i]);
  }
  std::sort(rest.begin(), rest.end());
  int next = 4;
  for (const auto& [id, label] : rest) {
    if (!relabel.contains(label)) relabel[label] = next++;
  }

  ClusterAssignment out = raw;
  for (auto& label : out.labels) label = relabel.at(label);
  return out;
}

}  // namespace tfsmell

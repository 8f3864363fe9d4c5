#pragma once

#include "tfsmell/catalog.hpp"

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tfsmell {

struct DistanceMatrix {
  std::vector<SmellId> ids;
  std::vector<double> entries;  // row-major

  std::size_t size() const { return ids.size(); }
  double at(std::size_t row, std::size_t col) const { return entries[row * ids.size() + col]; }

  /// Builds a matrix from explicit rows. Throws std::invalid_argument when
  /// the rows are not square or do not match the number of ids.
  static DistanceMatrix from_rows(std::vector<SmellId> ids, const std::vector<std::vector<double>>& rows);
};

/// d = 1 - s.
DistanceMatrix distance_matrix(const SimilarityMatrix& sim);

enum class Linkage { Single, Complete, Average };

std::string_view to_string(Linkage linkage);
Linkage parse_linkage(std::string_view text);

struct Merge {
  std::size_t left = 0;   // node id
  std::size_t right = 0;  // node id
  double distance = 0.0;
  std::size_t size = 0;   // leaves under the new node
};

/// Leaves are nodes 0..n-1; the k-th merge creates node n+k.
struct Dendrogram {
  std::vector<SmellId> leaves;
  std::vector<Merge> merges;
};

/// Bottom-up clustering. Among pairs at the minimum linkage distance the
/// pair with the smallest (min leaf, max leaf) of the clusters' lowest leaves
/// is merged first. Throws std::invalid_argument for asymmetric input or a
/// non-zero diagonal.
Dendrogram agglomerate(const DistanceMatrix& distances, Linkage linkage = Linkage::Average);

struct ClusterAssignment {
  std::vector<SmellId> leaves;
  std::vector<int> labels;  // parallel to leaves
  int num_clusters = 0;

  int label_of(SmellId id) const;
};

/// Connected components of the merges whose distance is below `threshold`.
/// Labels are numbered from 1 in order of each cluster's first leaf.
ClusterAssignment cut(const Dendrogram& dendrogram, double threshold);

/// distance -> agglomerate -> cut(0.5), relabelled so the cluster holding
/// SS3 is 1, SS1 is 2, SS5 is 3 and any others follow from 4.
ClusterAssignment categorize(const std::vector<SmellDescriptor>& smells,
                             Linkage linkage = Linkage::Average);

}  // namespace tfsmell

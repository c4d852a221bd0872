#pragma once

#include <span>
#include <vector>

#include "loopfield/network.hpp"

namespace loopfield {

class UnionFind {
 public:
  explicit UnionFind(std::size_t n);
  VertexId find(VertexId x);
  /// Returns true if two distinct classes were merged.
  bool unite(VertexId a, VertexId b);
  std::size_t size() const { return parent_.size(); }

 private:
  std::vector<VertexId> parent_;
  std::vector<unsigned char> rank_;
};

/// Partition of the vertices into clusters. Clusters are ordered by their
/// smallest vertex, which is also the cluster's label.
struct ClusterPartition {
  std::vector<VertexId> label;                  // per vertex: min vertex of its cluster
  std::vector<std::size_t> cluster_of;          // per vertex: index into `clusters`
  std::vector<std::vector<VertexId>> clusters;  // sorted vertex lists
  std::vector<std::vector<EdgeId>> edges;       // edges inside each cluster that were used

  std::size_t cluster_count() const { return clusters.size(); }
  bool same_cluster(VertexId x, VertexId y) const { return label[x] == label[y]; }
};

/// Builds the partition from a union-find structure; `used_edges` are
/// attributed to the cluster of their endpoints.
ClusterPartition make_partition(UnionFind& sets, const Network& net,
                                std::span<const EdgeId> used_edges);

/// Connected components of the open edges.
ClusterPartition components(const Network& net, std::span<const EdgeId> open_edges);

/// True when every cluster of `fine` lies inside one cluster of `coarse`.
bool refines(const ClusterPartition& fine, const ClusterPartition& coarse);

}  // namespace loopfield

#include "loopfield/clusters.hpp"

#include <algorithm>
#include <numeric>

namespace loopfield {

UnionFind::UnionFind(std::size_t n) : parent_(n), rank_(n, 0) {
  std::iota(parent_.begin(), parent_.end(), VertexId{0});
}

VertexId UnionFind::find(VertexId x) {
  while (parent_[x] != x) {
    parent_[x] = parent_[parent_[x]];
    x = parent_[x];
  }
  return x;
}

bool UnionFind::unite(VertexId a, VertexId b) {
  a = find(a);
  b = find(b);
  if (a == b) return false;
  if (rank_[a] < rank_[b]) std::swap(a, b);
  parent_[b] = a;
  if (rank_[a] == rank_[b]) ++rank_[a];
  return true;
}

ClusterPartition make_partition(UnionFind& sets, const Network& net,
                                std::span<const EdgeId> used_edges) {
  const std::size_t n = sets.size();
  ClusterPartition part;
  part.label.assign(n, 0);
  part.cluster_of.assign(n, 0);
  std::vector<std::size_t> root_cluster(n, n);
  for (VertexId x = 0; x < n; ++x) {
    const VertexId r = sets.find(x);
    // Vertices are scanned in increasing order, so the first vertex of each
    // class is its minimum.
    if (root_cluster[r] == n) {
      root_cluster[r] = part.clusters.size();
      part.clusters.push_back({});
    }
    const std::size_t c = root_cluster[r];
    part.cluster_of[x] = c;
    part.clusters[c].push_back(x);
    part.label[x] = part.clusters[c].front();
  }
  part.edges.resize(part.clusters.size());
  for (EdgeId e : used_edges) {
    part.edges[part.cluster_of[net.edge(e).u]].push_back(e);
  }
  for (auto& list : part.edges) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
  return part;
}

ClusterPartition components(const Network& net, std::span<const EdgeId> open_edges) {
  UnionFind sets(net.vertex_count());
  for (EdgeId e : open_edges) sets.unite(net.edge(e).u, net.edge(e).v);
  return make_partition(sets, net, open_edges);
}

bool refines(const ClusterPartition& fine, const ClusterPartition& coarse) {
  for (const auto& cluster : fine.clusters) {
    for (VertexId x : cluster) {
      if (coarse.label[x] != coarse.label[cluster.front()]) return false;
    }
  }
  return true;
}

}  // namespace loopfield

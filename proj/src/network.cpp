#include "loopfield/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <utility>

namespace loopfield {

namespace {

struct DisjointSets {
  std::vector<std::size_t> parent;
  explicit DisjointSets(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), std::size_t{0});
  }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

std::optional<VertexId> LatticeInfo::vertex_at(std::span<const int> coord) const {
  if (static_cast<int>(coord.size()) != dimension) return std::nullopt;
  // Alive vertices are sorted row-major, so a binary search over the
  // coordinate table finds the index.
  const std::size_t count = coordinates.size() / static_cast<std::size_t>(dimension);
  std::size_t lo = 0, hi = count;
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    const auto c = coordinate(static_cast<VertexId>(mid));
    if (std::lexicographical_compare(c.begin(), c.end(), coord.begin(), coord.end())) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  if (lo < count) {
    const auto c = coordinate(static_cast<VertexId>(lo));
    if (std::equal(c.begin(), c.end(), coord.begin())) return static_cast<VertexId>(lo);
  }
  return std::nullopt;
}

Network Network::create(std::size_t vertex_count, std::vector<Edge> edges,
                        std::vector<double> killing) {
  return assemble(vertex_count, std::move(edges), std::move(killing), Check::full);
}

Network Network::assemble(std::size_t vertex_count, std::vector<Edge> edges,
                          std::vector<double> killing, Check check) {
  if (vertex_count == 0) throw NetworkError("network needs at least one vertex");
  if (killing.size() != vertex_count) {
    throw NetworkError("killing vector has " + std::to_string(killing.size()) +
                       " entries, expected " + std::to_string(vertex_count));
  }
  std::set<std::pair<VertexId, VertexId>> seen;
  for (const auto& e : edges) {
    if (e.u >= vertex_count || e.v >= vertex_count) {
      throw NetworkError("edge endpoint out of range");
    }
    if (e.u == e.v) throw NetworkError("self-loops are not allowed");
    if (!(e.conductance > 0.0) || !std::isfinite(e.conductance)) {
      throw NetworkError("conductances must be positive and finite");
    }
    if (!seen.emplace(std::min(e.u, e.v), std::max(e.u, e.v)).second) {
      throw NetworkError("parallel edges are not allowed");
    }
  }
  for (double k : killing) {
    if (!(k >= 0.0)) throw NetworkError("killing must be non-negative");
  }

  if (check == Check::full) {
    std::vector<std::size_t> degree(vertex_count, 0);
    DisjointSets sets(vertex_count);
    for (const auto& e : edges) {
      ++degree[e.u];
      ++degree[e.v];
      sets.unite(e.u, e.v);
    }
    if (vertex_count > 1) {
      for (std::size_t x = 0; x < vertex_count; ++x) {
        if (degree[x] == 0) {
          throw NetworkError("vertex " + std::to_string(x) + " has no incident edge");
        }
      }
    }
    for (std::size_t x = 0; x < vertex_count; ++x) {
      if (sets.find(x) != 0) throw NetworkError("graph is not connected");
    }
  }

  // Eliminate absorbing vertices.
  Network net;
  net.input_index_.assign(vertex_count, -1);
  std::size_t alive = 0;
  for (std::size_t x = 0; x < vertex_count; ++x) {
    if (std::isinf(killing[x])) {
      ++net.absorbed_count_;
    } else {
      net.input_index_[x] = static_cast<std::int64_t>(alive++);
    }
  }
  if (alive == 0) throw NetworkError("every vertex is absorbing");
  net.killing_.assign(alive, 0.0);
  for (std::size_t x = 0; x < vertex_count; ++x) {
    if (net.input_index_[x] >= 0) net.killing_[net.input_index_[x]] = killing[x];
  }
  for (const auto& e : edges) {
    const auto iu = net.input_index_[e.u];
    const auto iv = net.input_index_[e.v];
    if (iu >= 0 && iv >= 0) {
      net.edges_.push_back({static_cast<VertexId>(iu), static_cast<VertexId>(iv), e.conductance});
    } else if (iu >= 0) {
      net.killing_[iu] += e.conductance;
    } else if (iv >= 0) {
      net.killing_[iv] += e.conductance;
    }
  }

  net.total_rate_ = net.killing_;
  std::vector<std::size_t> degree(alive, 0);
  for (const auto& e : net.edges_) {
    net.total_rate_[e.u] += e.conductance;
    net.total_rate_[e.v] += e.conductance;
    ++degree[e.u];
    ++degree[e.v];
  }
  net.offsets_.assign(alive + 1, 0);
  for (std::size_t x = 0; x < alive; ++x) net.offsets_[x + 1] = net.offsets_[x] + degree[x];
  net.adjacency_.resize(net.offsets_[alive]);
  std::vector<std::size_t> fill(net.offsets_.begin(), net.offsets_.end() - 1);
  for (std::size_t i = 0; i < net.edges_.size(); ++i) {
    const auto& e = net.edges_[i];
    net.adjacency_[fill[e.u]++] = {e.v, static_cast<EdgeId>(i), e.conductance};
    net.adjacency_[fill[e.v]++] = {e.u, static_cast<EdgeId>(i), e.conductance};
  }
  for (std::size_t x = 0; x < alive; ++x) {
    std::sort(net.adjacency_.begin() + net.offsets_[x], net.adjacency_.begin() + net.offsets_[x + 1],
              [](const Neighbor& a, const Neighbor& b) { return a.vertex < b.vertex; });
  }

  // Transience: every connected component must carry some killing.
  DisjointSets comps(alive);
  for (const auto& e : net.edges_) comps.unite(e.u, e.v);
  std::vector<char> killed(alive, 0);
  for (std::size_t x = 0; x < alive; ++x) {
    if (net.killing_[x] > 0.0) killed[comps.find(x)] = 1;
  }
  for (std::size_t x = 0; x < alive; ++x) {
    if (!killed[comps.find(x)]) {
      throw NetworkError(
          "recurrent network: a connected component has zero killing and no absorbing "
          "boundary");
    }
  }
  for (std::size_t x = 0; x < alive; ++x) {
    if (!(net.total_rate_[x] > 0.0)) throw NetworkError("vertex with zero total rate");
  }
  return net;
}

double Network::jump_probability(VertexId x, VertexId y) const {
  const auto e = find_edge(x, y);
  return e ? edges_[*e].conductance / total_rate_[x] : 0.0;
}

std::optional<EdgeId> Network::find_edge(VertexId x, VertexId y) const {
  if (x >= vertex_count() || y >= vertex_count()) return std::nullopt;
  const auto nb = neighbors(x);
  const auto it = std::lower_bound(nb.begin(), nb.end(), y,
                                   [](const Neighbor& a, VertexId v) { return a.vertex < v; });
  if (it != nb.end() && it->vertex == y) return it->edge;
  return std::nullopt;
}

Network build_box_network(int dimension, int half_width, double conductance,
                          double killing, BoundaryMode mode) {
  if (dimension < 1) throw NetworkError("dimension must be positive");
  if (half_width < 0) throw NetworkError("half width must be non-negative");
  if (!(conductance > 0.0)) throw NetworkError("conductance must be positive");
  if (!(killing >= 0.0)) throw NetworkError("killing must be non-negative");
  if (killing == 0.0 && mode == BoundaryMode::killed_uniform) {
    throw NetworkError("recurrent network: zero killing without an absorbing boundary");
  }
  const int side = 2 * half_width + 1;
  std::size_t count = 1;
  for (int i = 0; i < dimension; ++i) count *= static_cast<std::size_t>(side);

  auto coords_of = [&](std::size_t index) {
    std::vector<int> c(dimension);
    for (int i = dimension - 1; i >= 0; --i) {
      c[i] = static_cast<int>(index % side) - half_width;
      index /= side;
    }
    return c;
  };
  auto absorbed = [&](const std::vector<int>& c) {
    switch (mode) {
      case BoundaryMode::absorbing:
        return std::any_of(c.begin(), c.end(), [&](int v) { return std::abs(v) == half_width; });
      case BoundaryMode::halfplane_floor:
        return c.back() == -half_width;
      case BoundaryMode::killed_uniform:
        return false;
    }
    return false;
  };

  std::vector<double> kill(count, killing);
  std::vector<Edge> edges;
  std::size_t stride = 1;
  std::vector<std::size_t> strides(dimension);
  for (int i = dimension - 1; i >= 0; --i) {
    strides[i] = stride;
    stride *= static_cast<std::size_t>(side);
  }
  LatticeInfo info{dimension, half_width, conductance, killing, mode, {}};
  for (std::size_t index = 0; index < count; ++index) {
    const auto c = coords_of(index);
    const bool dead = absorbed(c);
    if (dead) {
      kill[index] = std::numeric_limits<double>::infinity();
    } else {
      info.coordinates.insert(info.coordinates.end(), c.begin(), c.end());
    }
    for (int i = 0; i < dimension; ++i) {
      if (c[i] < half_width) {
        const std::size_t next = index + strides[i];
        // Edges between two absorbed vertices carry nothing.
        if (dead && absorbed(coords_of(next))) continue;
        edges.push_back({static_cast<VertexId>(index), static_cast<VertexId>(next), conductance});
      }
    }
  }
  Network net = Network::assemble(count, std::move(edges), std::move(kill),
                                  mode == BoundaryMode::killed_uniform ? Network::Check::full
                                                                       : Network::Check::transience_only);
  net.lattice_ = std::move(info);
  return net;
}

Network build_grid_network(std::span<const int> shape, double conductance, double killing) {
  if (shape.empty()) throw NetworkError("grid shape is empty");
  std::size_t count = 1;
  for (int s : shape) {
    if (s < 1) throw NetworkError("grid sides must be positive");
    count *= static_cast<std::size_t>(s);
  }
  const std::size_t d = shape.size();
  std::vector<std::size_t> strides(d);
  std::size_t stride = 1;
  for (std::size_t i = d; i-- > 0;) {
    strides[i] = stride;
    stride *= static_cast<std::size_t>(shape[i]);
  }
  std::vector<Edge> edges;
  for (std::size_t index = 0; index < count; ++index) {
    for (std::size_t i = 0; i < d; ++i) {
      const std::size_t ci = (index / strides[i]) % static_cast<std::size_t>(shape[i]);
      if (ci + 1 < static_cast<std::size_t>(shape[i])) {
        edges.push_back({static_cast<VertexId>(index), static_cast<VertexId>(index + strides[i]),
                         conductance});
      }
    }
  }
  return Network::create(count, std::move(edges), std::vector<double>(count, killing));
}

Network build_path_network(std::size_t count, double conductance, double killing) {
  const int side = static_cast<int>(count);
  return build_grid_network(std::span<const int>(&side, 1), conductance, killing);
}

Network modified_network(const Network& net, std::span<const EdgeId> removed_edges) {
  std::vector<char> removed(net.edge_count(), 0);
  for (EdgeId e : removed_edges) {
    if (e >= net.edge_count()) throw NetworkError("unknown edge id " + std::to_string(e));
    if (removed[e]) throw NetworkError("edge " + std::to_string(e) + " removed twice");
    removed[e] = 1;
  }
  std::vector<double> killing(net.killing().begin(), net.killing().end());
  std::vector<Edge> edges;
  for (EdgeId e = 0; e < net.edge_count(); ++e) {
    const auto& edge = net.edge(e);
    if (removed[e]) {
      killing[edge.u] += edge.conductance;
      killing[edge.v] += edge.conductance;
    } else {
      edges.push_back(edge);
    }
  }
  Network out = Network::assemble(net.vertex_count(), std::move(edges), std::move(killing),
                                  Network::Check::transience_only);
  out.lattice_ = net.lattice_;
  return out;
}

std::string to_string(BoundaryMode mode) {
  switch (mode) {
    case BoundaryMode::absorbing: return "absorbing";
    case BoundaryMode::killed_uniform: return "killed_uniform";
    case BoundaryMode::halfplane_floor: return "halfplane_floor";
  }
  return "unknown";
}

BoundaryMode parse_boundary_mode(const std::string& name) {
  if (name == "absorbing") return BoundaryMode::absorbing;
  if (name == "killed_uniform") return BoundaryMode::killed_uniform;
  if (name == "halfplane_floor") return BoundaryMode::halfplane_floor;
  throw NetworkError("unknown boundary mode '" + name + "'");
}

}  // namespace loopfield

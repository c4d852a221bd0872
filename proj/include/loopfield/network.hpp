#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace loopfield {

using VertexId = std::uint32_t;
using EdgeId = std::uint32_t;

class NetworkError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Edge {
  VertexId u;
  VertexId v;
  double conductance;
};

struct Neighbor {
  VertexId vertex;
  EdgeId edge;
  double conductance;
};

enum class BoundaryMode { absorbing, killed_uniform, halfplane_floor };

/// Coordinates of a box network built by `build_box_network`. Alive vertices
/// are numbered in row-major order of their coordinates (last coordinate
/// varies fastest), absorbed vertices are skipped.
struct LatticeInfo {
  int dimension = 0;
  int half_width = 0;
  double conductance = 0.0;
  double killing = 0.0;
  BoundaryMode mode = BoundaryMode::killed_uniform;
  std::vector<int> coordinates;  // vertex_count * dimension

  std::span<const int> coordinate(VertexId x) const {
    return {coordinates.data() + static_cast<std::size_t>(x) * dimension,
            static_cast<std::size_t>(dimension)};
  }
  std::optional<VertexId> vertex_at(std::span<const int> coord) const;
};

/// Finite weighted graph with killing. Immutable once constructed.
///
/// Killing may be given as +infinity for absorbing vertices: they are removed
/// from the vertex set and every edge into them turns into killing of rate C
/// on the surviving endpoint.
class Network {
 public:
  static Network create(std::size_t vertex_count, std::vector<Edge> edges,
                        std::vector<double> killing);

  std::size_t vertex_count() const { return killing_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  std::span<const Edge> edges() const { return edges_; }
  const Edge& edge(EdgeId e) const { return edges_.at(e); }

  double killing(VertexId x) const { return killing_[x]; }
  std::span<const double> killing() const { return killing_; }
  /// lambda_x = kappa(x) + sum_y C(x, y)
  double total_rate(VertexId x) const { return total_rate_[x]; }
  double jump_probability(VertexId x, VertexId y) const;
  double kill_probability(VertexId x) const { return killing_[x] / total_rate_[x]; }
  /// Cable length rho(e) = 1 / (2 C(e)).
  double edge_length(EdgeId e) const { return 0.5 / edges_.at(e).conductance; }

  std::span<const Neighbor> neighbors(VertexId x) const {
    return {adjacency_.data() + offsets_[x], offsets_[x + 1] - offsets_[x]};
  }
  std::optional<EdgeId> find_edge(VertexId x, VertexId y) const;

  /// Number of +inf-killing vertices eliminated at construction.
  std::size_t absorbed_count() const { return absorbed_count_; }
  /// For every input vertex, its index in this network, or -1 if absorbed.
  std::span<const std::int64_t> input_index() const { return input_index_; }

  const std::optional<LatticeInfo>& lattice() const { return lattice_; }

 private:
  friend Network modified_network(const Network& net,
                                  std::span<const EdgeId> removed_edges);
  friend Network build_box_network(int, int, double, double, BoundaryMode);

  enum class Check { full, transience_only };
  static Network assemble(std::size_t vertex_count, std::vector<Edge> edges,
                          std::vector<double> killing, Check check);

  std::vector<Edge> edges_;
  std::vector<double> killing_;
  std::vector<double> total_rate_;
  std::vector<std::size_t> offsets_;
  std::vector<Neighbor> adjacency_;
  std::size_t absorbed_count_ = 0;
  std::vector<std::int64_t> input_index_;
  std::optional<LatticeInfo> lattice_;
};

/// Box [-n, n]^d with uniform conductances.
Network build_box_network(int dimension, int half_width, double conductance,
                          double killing, BoundaryMode mode);

/// Rectangular grid with the given side lengths, uniform C and kappa.
Network build_grid_network(std::span<const int> shape, double conductance,
                           double killing);

/// Path 0 - 1 - ... - (count-1), uniform C and kappa.
Network build_path_network(std::size_t count, double conductance, double killing);

/// Removes the given edges and moves their conductance onto the endpoints'
/// killing. Total rates are unchanged.
Network modified_network(const Network& net, std::span<const EdgeId> removed_edges);

std::string to_string(BoundaryMode mode);
BoundaryMode parse_boundary_mode(const std::string& name);

}  // namespace loopfield

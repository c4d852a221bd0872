#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "loopfield/green.hpp"
#include "loopfield/loop_soup.hpp"
#include "loopfield/network.hpp"
#include "loopfield/report.hpp"
#include "loopfield/rng.hpp"
#include "loopfield/stats.hpp"

namespace loopfield {

class CapacityError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Equilibrium measure of K on a network, in the conductance-weighted
/// normalisation e_K(x) = lambda_x P_x(no return to K), which is the mass
/// rate at which trajectories of the unit-conductance process leave K for
/// good. On Z^d this is 2d times the escape probability of the discrete walk.
struct CapacityReport {
  std::vector<VertexId> set;
  std::vector<double> escape_probability;
  std::vector<double> equilibrium;
  double capacity = 0.0;
  /// Lattice distance from K to the absorbed boundary layer (-1 if unknown).
  int margin = -1;
  /// cap(K) on the box of half width n + 4 minus cap(K) on this box; NaN if
  /// the network is not a box.
  double boundary_drift = std::numeric_limits<double>::quiet_NaN();
};

/// Minimal lattice distance to the boundary for compute_capacity.
inline constexpr int kCapacityMargin = 2;

/// Escape probabilities from a harmonic solve on the box (conjugate
/// gradient on the energy form restricted to the complement of K).
/// Throws CapacityError for empty K or K closer than kCapacityMargin to
/// the absorbing boundary.
CapacityReport compute_capacity(const Network& net, std::span<const VertexId> set);

/// Same without the margin check and without the drift estimate.
CapacityReport capacity_on(const Network& net, std::span<const VertexId> set);

/// Vertices of a box network with coordinates in [-r, r]^d.
std::vector<VertexId> window_vertices(const Network& box, int radius);

/// Box [-n, n]^d with the boundary identified to one vertex x_*, unit
/// conductances. The interior is stored as the box network with absorbing
/// boundary, whose killing at x equals the conductance between x and x_*
/// (parallel edges to x_* merged).
struct StarGraph {
  int dimension = 0;
  int half_width = 0;
  Network interior;
  double star_rate = 0.0;  // 2d (2n - 1)^{d-1}
  std::vector<VertexId> entry_vertices;   // interior neighbours of x_*
  std::vector<double> entry_cumulative;   // cumulative conductance to x_*

  std::size_t interior_count() const { return interior.vertex_count(); }
  VertexId star_vertex() const { return static_cast<VertexId>(interior.vertex_count()); }
  double star_conductance(VertexId x) const { return interior.killing(x); }
};

StarGraph build_star_graph(int dimension, int half_width);

/// Vertex path with holding times. Star excursions start right after x_*
/// and end just before the return to it.
struct Trajectory {
  std::vector<VertexId> vertices;
  std::vector<double> holding_times;
};

struct InterlacementSample {
  std::vector<Trajectory> trajectories;  // empty unless requested
  std::vector<double> occupation;        // per network vertex
  double level_u = 0.0;
  std::size_t trajectory_count = 0;
  /// Trajectories that visit the marked set given in the options.
  std::size_t marked_hits = 0;
  /// Edge ids crossed at least once (when tracked), sorted.
  std::vector<EdgeId> crossed_edges;
  /// Star sampler only: interior vertices whose edge to x_* was crossed.
  std::vector<VertexId> star_crossings;
};

struct SamplerOptions {
  bool record_paths = false;
  bool track_edges = false;
  /// Optional vertex mask (size = vertex count) for marked_hits.
  const std::vector<char>* marked = nullptr;
};

/// Forward parts of the interlacement trajectories that enter the set of
/// `capacity`: N ~ Poisson(u cap), starts ~ e_K / cap, each run until
/// killed. Occupation is exact on the set (and on anything only reachable
/// after entering it).
InterlacementSample sample_interlacement_trace(const Network& net, const CapacityReport& capacity,
                                               double u, RandomStream& rng,
                                               const SamplerOptions& options = {});

/// Excursions of the star-graph process away from x_* until x_* has
/// accumulated holding time u; occupation L_{tau_u} on the interior.
InterlacementSample sample_star_excursions(const StarGraph& star, double u, RandomStream& rng,
                                           const SamplerOptions& options = {});

struct InterlacementCheckOptions {
  int dimension = 3;
  int half_width = 8;
  int window_radius = 2;
  double u = 1.0;
  std::vector<std::vector<std::vector<int>>> vacancy_sets;  // each a list of coordinates
  std::uint64_t replicas = 100000;
  std::uint64_t star_replicas = 20000;
  std::uint64_t seed = 1;
  Thresholds thresholds;
};

/// Vacant-set law, occupation mean u on the window, and agreement between
/// the trace sampler and the star-excursion sampler at the same volume.
Report interlacement_check(const InterlacementCheckOptions& options);

/// L_{tau_u} + phi'^2/2 against (phi - sqrt(2u))^2/2 on the star graph,
/// first and second moments per vertex (two-sample and against the exact
/// values). For u = 0 the marginal laws are KS-tested against phi^2/2.
Report isomorphism_check(const StarGraph& star, double u, std::uint64_t replicas,
                         std::uint64_t seed, const Thresholds& thresholds = {});

struct LevelSetOutcome {
  std::size_t violations = 0;           // visited vertices with phi >= sqrt(2u)
  std::size_t above_level = 0;          // vertices with phi > sqrt(2u)
  std::size_t above_level_vacant = 0;   // ... of which unvisited
  std::vector<double> field;            // phi on the interior
};

/// One replica of the finite-volume coupling between the star excursions
/// and a free field phi with {phi > sqrt(2u)} inside the vacant set.
LevelSetOutcome levelset_replica(const StarGraph& star, const LoopSampler& loops, double u,
                                 RandomStream& rng);

Report levelset_containment_check(const StarGraph& star, double u, std::uint64_t replicas,
                                  std::uint64_t seed, const Thresholds& thresholds = {},
                                  double length_cutoff_eps = 1e-7);

}  // namespace loopfield

#pragma once

#include <vector>

#include <Eigen/Core>

#include "loopfield/clusters.hpp"
#include "loopfield/green.hpp"
#include "loopfield/rng.hpp"

namespace loopfield {

/// Discrete print of a non-trivial loop: a cyclic vertex sequence of length
/// at least 2 in which consecutive entries (including last -> first) are
/// adjacent.
struct LoopSkeleton {
  std::vector<VertexId> vertices;
};

struct Loop {
  LoopSkeleton skeleton;
  std::vector<double> holding_times;  // one per visit
};

struct LoopSoupSample {
  std::vector<Loop> loops;
  std::vector<double> trivial_occupation;  // total duration of one-point loops
  double alpha = 0.0;
};

struct OccupationField {
  std::vector<double> values;
};

/// Sampler for the Poisson ensemble of loops of intensity alpha * mu.
///
/// Non-trivial loops are drawn from their discrete skeleton law: the rooted
/// loop (x_0, ..., x_{n-1}) has mass prod P(x_i, x_{i+1}) / n, so the total
/// mass is m = -log det(I - P) = sum_x log lambda_x - log det A. Lengths are
/// truncated at the first N with tail bound |V| rho^{N+1} / ((N+1)(1-rho))
/// below eps * m, rho the spectral radius of P. Each visit to x holds for an
/// Exponential(lambda_x) time; one-point loops at x add up to a
/// Gamma(alpha, rate lambda_x) occupation.
///
/// Construction computes and caches P^0..P^N; sampling is const and
/// thread-safe afterwards.
class LoopSampler {
 public:
  LoopSampler(const Network& net, const GreenOperator& gop, double length_cutoff_eps = 1e-7);
  LoopSampler(const Network& net, double length_cutoff_eps = 1e-7);

  LoopSoupSample sample(double alpha, RandomStream& rng) const;

  const Network& network() const { return net_; }
  /// m = -log det(I - P).
  double total_mass() const { return total_mass_; }
  /// Mass of lengths 2..max_length().
  double truncated_mass() const { return truncated_mass_; }
  /// m - truncated_mass(), clamped at zero.
  double tail_mass() const;
  double tail_bound() const { return tail_bound_; }
  double spectral_radius() const { return spectral_radius_; }
  std::size_t max_length() const { return powers_.empty() ? 0 : powers_.size() - 1; }
  double length_cutoff_eps() const { return eps_; }

 private:
  void build(double log_det_a);
  VertexId draw_root(std::size_t length, double u) const;
  LoopSkeleton draw_skeleton(std::size_t length, RandomStream& rng) const;

  Network net_;
  double eps_;
  Eigen::MatrixXd jump_;
  std::vector<Eigen::MatrixXd> powers_;        // P^k, k = 0..N
  std::vector<double> length_cumulative_;      // over lengths 2..N
  std::vector<std::vector<double>> root_cumulative_;  // per length, over vertices
  double total_mass_ = 0.0;
  double truncated_mass_ = 0.0;
  double tail_bound_ = 0.0;
  double spectral_radius_ = 0.0;
};

LoopSoupSample sample_loop_soup(const Network& net, const GreenOperator& gop, double alpha,
                                RandomStream& rng, double length_cutoff_eps = 1e-7);

OccupationField occupation_field(const LoopSoupSample& sample);

/// Edges crossed by the loops (consecutive visits, last -> first included),
/// sorted and unique.
std::vector<EdgeId> traversed_edges(const LoopSoupSample& sample, const Network& net);

/// Clusters of loops sharing a vertex; vertices visited by no non-trivial
/// loop stay singletons.
ClusterPartition loop_clusters(const LoopSoupSample& sample, const Network& net);

}  // namespace loopfield

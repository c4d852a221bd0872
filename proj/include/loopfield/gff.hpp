#pragma once

#include <vector>

#include "loopfield/clusters.hpp"
#include "loopfield/green.hpp"
#include "loopfield/report.hpp"
#include "loopfield/rng.hpp"
#include "loopfield/stats.hpp"

namespace loopfield {

struct FieldSample {
  std::vector<double> values;
};

/// Cable-graph sign clusters seen on the edges: open[e] is true when the
/// cable field has no zero on edge e.
struct EdgeConfiguration {
  std::vector<bool> open;

  std::vector<EdgeId> open_edges() const;
};

/// phi = chol * z with z standard normal.
FieldSample sample_gff(const GreenOperator& gop, RandomStream& rng);

/// Probability that the variance-2 Brownian bridge of length 1/(2C) from a to
/// b has no zero: 0 if a*b <= 0, else 1 - exp(-2 C |a b|).
double no_zero_probability(double conductance, double a, double b);

EdgeConfiguration sample_edge_configuration(const FieldSample& field, const Network& net,
                                            RandomStream& rng);

/// (2/pi) arcsin(g(x, y)): probability that x and y share a cable sign cluster.
double connectivity_probability(const GreenOperator& gop, VertexId x, VertexId y);

ClusterPartition cluster_edges(const EdgeConfiguration& config, const Network& net);

struct ConnectivityEstimate {
  double exact = 0.0;
  double connected_fraction = 0.0;
  double connected_stderr = 0.0;
  double sign_correlation = 0.0;
  double sign_stderr = 0.0;
};

/// Monte Carlo of P(x <-> y) under the cable configuration and of
/// E[sign(phi_x) sign(phi_y)], both against (2/pi) arcsin(g(x, y)).
ConnectivityEstimate estimate_connectivity(const Network& net, const GreenOperator& gop,
                                           VertexId x, VertexId y, std::uint64_t replicas,
                                           std::uint64_t seed);

Report connectivity_report(const ConnectivityEstimate& est, const Thresholds& th);

}  // namespace loopfield

#pragma once

#include <vector>

#include "loopfield/gff.hpp"
#include "loopfield/loop_soup.hpp"
#include "loopfield/report.hpp"
#include "loopfield/stats.hpp"

namespace loopfield {

/// Loop soup at intensity 1/2 together with the free field built from it:
/// unvisited edges are opened at random, the merged clusters get independent
/// uniform signs and phi_x = sign * sqrt(2 L_x).
struct CoupledSample {
  LoopSoupSample soup;
  OccupationField occupation;
  ClusterPartition base_clusters;
  std::vector<EdgeId> extra_open_edges;
  ClusterPartition merged_clusters;
  std::vector<int> signs;  // per merged cluster, in cluster order
  FieldSample field;
};

/// 1 - exp(-2 C sqrt(L_x L_y))
double opening_probability(double conductance, double occupation_x, double occupation_y);

/// Throws std::invalid_argument unless soup.alpha == 1/2.
CoupledSample couple(const Network& net, LoopSoupSample soup, RandomStream& rng);

/// Number of loop clusters on which the sign of phi is not constant.
std::size_t sign_violations(const CoupledSample& sample);

struct CouplingCheckOptions {
  std::uint64_t replicas = 100000;
  std::uint64_t seed = 1;
  double length_cutoff_eps = 1e-7;
  Thresholds thresholds;
  /// Edge for the no-crossing identity; none when the network has no edges.
  std::optional<EdgeId> designated_edge = EdgeId{0};
};

/// Runs soup + coupling and checks the result against the free field:
/// per-vertex normality (KS), covariance vs G, sign correlation vs
/// (2/pi) arcsin(g), sign constancy on loop clusters, and for the designated
/// edge P(edge outside the extended clusters) against
/// E[exp(-C(|psi_x psi_y| + psi_x psi_y))] from independent fields.
Report verify_gff_law(const Network& net, const GreenOperator& gop,
                      const CouplingCheckOptions& options);

}  // namespace loopfield

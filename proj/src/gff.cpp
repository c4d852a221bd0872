#include "loopfield/gff.hpp"

#include <cmath>
#include <numbers>

#include "loopfield/replicas.hpp"

namespace loopfield {

std::vector<EdgeId> EdgeConfiguration::open_edges() const {
  std::vector<EdgeId> out;
  for (std::size_t e = 0; e < open.size(); ++e) {
    if (open[e]) out.push_back(static_cast<EdgeId>(e));
  }
  return out;
}

FieldSample sample_gff(const GreenOperator& gop, RandomStream& rng) {
  const auto n = static_cast<Eigen::Index>(gop.size());
  std::normal_distribution<double> normal;
  Eigen::VectorXd z(n);
  for (Eigen::Index i = 0; i < n; ++i) z[i] = normal(rng);
  const Eigen::VectorXd phi = gop.chol().triangularView<Eigen::Lower>() * z;
  return {std::vector<double>(phi.data(), phi.data() + n)};
}

double no_zero_probability(double conductance, double a, double b) {
  const double product = a * b;
  if (!(product > 0.0)) return 0.0;
  return -std::expm1(-2.0 * conductance * product);
}

EdgeConfiguration sample_edge_configuration(const FieldSample& field, const Network& net,
                                            RandomStream& rng) {
  if (field.values.size() != net.vertex_count()) {
    throw std::invalid_argument("field size does not match the network");
  }
  EdgeConfiguration config;
  config.open.assign(net.edge_count(), false);
  for (EdgeId e = 0; e < net.edge_count(); ++e) {
    const auto& edge = net.edge(e);
    const double p = no_zero_probability(edge.conductance, field.values[edge.u], field.values[edge.v]);
    // One uniform per edge keeps the stream layout independent of the field.
    const double u = uniform01(rng);
    config.open[e] = u < p;
  }
  return config;
}

double connectivity_probability(const GreenOperator& gop, VertexId x, VertexId y) {
  const double g = std::clamp(normalized_green(gop, x, y), -1.0, 1.0);
  return 2.0 / std::numbers::pi * std::asin(g);
}

ClusterPartition cluster_edges(const EdgeConfiguration& config, const Network& net) {
  const auto open = config.open_edges();
  return components(net, open);
}

ConnectivityEstimate estimate_connectivity(const Network& net, const GreenOperator& gop,
                                           VertexId x, VertexId y, std::uint64_t replicas,
                                           std::uint64_t seed) {
  struct Outcome {
    double connected;
    double sign_product;
  };
  RunningStats connected, sign;
  run_replicas(
      replicas, seed,
      [&](std::uint64_t, RandomStream& rng) {
        const FieldSample field = sample_gff(gop, rng);
        const EdgeConfiguration config = sample_edge_configuration(field, net, rng);
        UnionFind sets(net.vertex_count());
        for (EdgeId e = 0; e < net.edge_count(); ++e) {
          if (config.open[e]) sets.unite(net.edge(e).u, net.edge(e).v);
        }
        const double sx = field.values[x] > 0 ? 1.0 : -1.0;
        const double sy = field.values[y] > 0 ? 1.0 : -1.0;
        return Outcome{sets.find(x) == sets.find(y) ? 1.0 : 0.0, sx * sy};
      },
      [&](std::uint64_t, Outcome o) {
        connected.add(o.connected);
        sign.add(o.sign_product);
      });
  ConnectivityEstimate est;
  est.exact = connectivity_probability(gop, x, y);
  est.connected_fraction = connected.mean();
  est.connected_stderr = connected.standard_error();
  est.sign_correlation = sign.mean();
  est.sign_stderr = sign.standard_error();
  return est;
}

Report connectivity_report(const ConnectivityEstimate& est, const Thresholds& th) {
  Report report;
  report.add(z_record("cable_connectivity", "P(x <-> y) = (2/pi) arcsin(g(x,y))", est.exact,
                      est.connected_fraction, est.connected_stderr,
                      z_score(est.connected_fraction, est.exact, est.connected_stderr),
                      th.max_abs_z));
  report.add(z_record("sign_correlation", "E[sign(phi_x) sign(phi_y)] = (2/pi) arcsin(g(x,y))",
                      est.exact, est.sign_correlation, est.sign_stderr,
                      z_score(est.sign_correlation, est.exact, est.sign_stderr), th.max_abs_z));
  return report;
}

}  // namespace loopfield

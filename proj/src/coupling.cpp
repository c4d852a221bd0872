#include "loopfield/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "loopfield/replicas.hpp"

namespace loopfield {

double opening_probability(double conductance, double occupation_x, double occupation_y) {
  const double product = occupation_x * occupation_y;
  if (!(product > 0.0)) return 0.0;
  return -std::expm1(-2.0 * conductance * std::sqrt(product));
}

CoupledSample couple(const Network& net, LoopSoupSample soup, RandomStream& rng) {
  if (soup.alpha != 0.5) {
    throw std::invalid_argument("the coupling holds only for the soup at intensity 1/2");
  }
  CoupledSample out;
  out.occupation = occupation_field(soup);
  out.base_clusters = loop_clusters(soup, net);

  std::vector<char> crossed(net.edge_count(), 0);
  for (const auto& cluster_edges : out.base_clusters.edges) {
    for (EdgeId e : cluster_edges) crossed[e] = 1;
  }
  UnionFind sets(net.vertex_count());
  std::vector<EdgeId> open;
  for (EdgeId e = 0; e < net.edge_count(); ++e) {
    const auto& edge = net.edge(e);
    if (crossed[e]) {
      sets.unite(edge.u, edge.v);
      open.push_back(e);
    }
  }
  for (const auto& cluster : out.base_clusters.clusters) {
    for (VertexId x : cluster) sets.unite(cluster.front(), x);
  }
  for (EdgeId e = 0; e < net.edge_count(); ++e) {
    if (crossed[e]) continue;
    const auto& edge = net.edge(e);
    const double p = opening_probability(edge.conductance, out.occupation.values[edge.u],
                                         out.occupation.values[edge.v]);
    if (uniform01(rng) < p) {
      out.extra_open_edges.push_back(e);
      open.push_back(e);
      sets.unite(edge.u, edge.v);
    }
  }
  std::sort(open.begin(), open.end());
  out.merged_clusters = make_partition(sets, net, open);

  // Clusters are already ordered by smallest vertex.
  std::bernoulli_distribution coin(0.5);
  out.signs.resize(out.merged_clusters.cluster_count());
  for (auto& s : out.signs) s = coin(rng) ? 1 : -1;

  out.field.values.resize(net.vertex_count());
  for (VertexId x = 0; x < net.vertex_count(); ++x) {
    out.field.values[x] = out.signs[out.merged_clusters.cluster_of[x]] *
                          std::sqrt(2.0 * out.occupation.values[x]);
  }
  out.soup = std::move(soup);
  return out;
}

std::size_t sign_violations(const CoupledSample& sample) {
  std::size_t bad = 0;
  for (const auto& cluster : sample.base_clusters.clusters) {
    const bool positive = sample.field.values[cluster.front()] >= 0.0;
    for (VertexId x : cluster) {
      if ((sample.field.values[x] >= 0.0) != positive) {
        ++bad;
        break;
      }
    }
  }
  return bad;
}

Report verify_gff_law(const Network& net, const GreenOperator& gop,
                      const CouplingCheckOptions& options) {
  const std::size_t n = net.vertex_count();
  const auto& th = options.thresholds;
  const LoopSampler sampler(net, gop, options.length_cutoff_eps);
  std::optional<EdgeId> edge = options.designated_edge;
  if (edge && *edge >= net.edge_count()) edge.reset();

  struct Outcome {
    std::vector<double> field;
    std::size_t violations = 0;
    bool refined = true;
    bool extra_disjoint = true;
    double edge_free = 0.0;
  };
  std::vector<std::vector<double>> samples(n);
  for (auto& s : samples) s.reserve(options.replicas);
  std::vector<RunningStats> cov(n * n), sign(n * n);
  RunningStats edge_free;
  std::size_t violations = 0, not_refined = 0, overlapping = 0;

  run_replicas(
      options.replicas, options.seed,
      [&](std::uint64_t, RandomStream& rng) {
        CoupledSample cs = couple(net, sampler.sample(0.5, rng), rng);
        Outcome o;
        o.violations = sign_violations(cs);
        o.refined = refines(cs.base_clusters, cs.merged_clusters);
        for (const auto& list : cs.base_clusters.edges) {
          for (EdgeId e : list) {
            if (std::binary_search(cs.extra_open_edges.begin(), cs.extra_open_edges.end(), e)) {
              o.extra_disjoint = false;
            }
          }
        }
        if (edge) {
          bool in_cluster = false;
          for (const auto& list : cs.merged_clusters.edges) {
            if (std::binary_search(list.begin(), list.end(), *edge)) in_cluster = true;
          }
          o.edge_free = in_cluster ? 0.0 : 1.0;
        }
        o.field = std::move(cs.field.values);
        return o;
      },
      [&](std::uint64_t, Outcome o) {
        violations += o.violations;
        not_refined += o.refined ? 0 : 1;
        overlapping += o.extra_disjoint ? 0 : 1;
        edge_free.add(o.edge_free);
        for (std::size_t x = 0; x < n; ++x) {
          samples[x].push_back(o.field[x]);
          for (std::size_t y = x; y < n; ++y) {
            cov[x * n + y].add(o.field[x] * o.field[y]);
            const double sx = o.field[x] > 0 ? 1.0 : -1.0;
            const double sy = o.field[y] > 0 ? 1.0 : -1.0;
            sign[x * n + y].add(sx * sy);
          }
        }
      });

  Report report;
  report.add(count_record("sign_constant_on_loop_clusters",
                          "sign(phi) constant on every loop cluster", 0.0,
                          static_cast<double>(violations)));
  report.add(count_record("loop_clusters_refine_merged",
                          "every loop cluster lies in one merged cluster", 0.0,
                          static_cast<double>(not_refined)));
  report.add(count_record("extra_edges_not_crossed",
                          "opened edges are disjoint from loop-crossed edges", 0.0,
                          static_cast<double>(overlapping)));
  for (std::size_t x = 0; x < n; ++x) {
    const double sd = std::sqrt(gop(x, x));
    const double d = ks_statistic(samples[x], [sd](double v) { return normal_cdf(v / sd); });
    report.add(ks_record("normal_marginal[" + std::to_string(x) + "]",
                         "phi_x ~ Normal(0, G(x,x))", d, ks_p_value(d, samples[x].size()),
                         th.min_ks_p));
  }
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = x; y < n; ++y) {
      const auto& c = cov[x * n + y];
      const double target = gop(x, y);
      report.add(z_record("covariance[" + std::to_string(x) + "," + std::to_string(y) + "]",
                          "E[phi_x phi_y] = G(x,y)", target, c.mean(), c.standard_error(),
                          z_score(c.mean(), target, c.standard_error()), th.max_abs_z));
    }
  }
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = x + 1; y < n; ++y) {
      const auto& s = sign[x * n + y];
      const double target =
          connectivity_probability(gop, static_cast<VertexId>(x), static_cast<VertexId>(y));
      report.add(z_record("sign_correlation[" + std::to_string(x) + "," + std::to_string(y) + "]",
                          "E[sign phi_x sign phi_y] = (2/pi) arcsin(g(x,y))", target, s.mean(),
                          s.standard_error(), z_score(s.mean(), target, s.standard_error()),
                          th.max_abs_z));
    }
  }
  if (edge) {
    // Independent free-field estimate of the same probability.
    const auto& e = net.edge(*edge);
    RunningStats weight;
    run_replicas(
        options.replicas, options.seed ^ 0xE1E1E1E1ULL,
        [&](std::uint64_t, RandomStream& rng) {
          const FieldSample psi = sample_gff(gop, rng);
          const double prod = psi.values[e.u] * psi.values[e.v];
          return std::exp(-e.conductance * (std::abs(prod) + prod));
        },
        [&](std::uint64_t, double w) { weight.add(w); });
    report.add(z_record("edge_outside_extended_clusters",
                        "P(e not in extended clusters) = E[exp(-C(|psi_x psi_y| + psi_x psi_y))]",
                        std::nullopt, edge_free.mean(), edge_free.standard_error(),
                        two_sample_z(edge_free.mean(), edge_free.standard_error(), weight.mean(),
                                     weight.standard_error()),
                        th.max_abs_z));
  }
  return report;
}

}  // namespace loopfield

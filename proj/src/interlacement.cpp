#include "loopfield/interlacement.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCore>

#include "loopfield/clusters.hpp"
#include "loopfield/coupling.hpp"
#include "loopfield/gff.hpp"
#include "loopfield/replicas.hpp"

namespace loopfield {

namespace {

std::vector<VertexId> checked_set(const Network& net, std::span<const VertexId> set) {
  if (set.empty()) throw CapacityError("capacity of the empty set is not defined");
  std::vector<VertexId> sorted(set.begin(), set.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw CapacityError("set contains a vertex twice");
  }
  if (sorted.back() >= net.vertex_count()) throw CapacityError("set vertex out of range");
  return sorted;
}

int boundary_distance(const LatticeInfo& lattice, VertexId x) {
  const auto c = lattice.coordinate(x);
  switch (lattice.mode) {
    case BoundaryMode::absorbing: {
      int worst = 0;
      for (int v : c) worst = std::max(worst, std::abs(v));
      return lattice.half_width - worst;
    }
    case BoundaryMode::halfplane_floor:
      return c.back() + lattice.half_width;
    case BoundaryMode::killed_uniform:
      break;
  }
  return std::numeric_limits<int>::max();
}

std::size_t draw_cumulative(const std::vector<double>& cumulative, double u) {
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u * cumulative.back());
  return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()),
                               cumulative.size() - 1);
}

/// Continuous-time walk from `start` until killed; returns the last vertex.
struct Walker {
  const Network& net;
  const SamplerOptions& options;
  InterlacementSample& sample;
  std::vector<char> crossed;

  Walker(const Network& n, const SamplerOptions& o, InterlacementSample& s)
      : net(n), options(o), sample(s) {
    sample.occupation.assign(net.vertex_count(), 0.0);
    if (options.track_edges) crossed.assign(net.edge_count(), 0);
  }

  VertexId run(VertexId start, RandomStream& rng) {
    Trajectory* path = nullptr;
    if (options.record_paths) path = &sample.trajectories.emplace_back();
    ++sample.trajectory_count;
    bool hit = false;
    VertexId x = start;
    for (;;) {
      const double rate = net.total_rate(x);
      const double hold = std::exponential_distribution<double>(rate)(rng);
      sample.occupation[x] += hold;
      if (path) {
        path->vertices.push_back(x);
        path->holding_times.push_back(hold);
      }
      if (options.marked && (*options.marked)[x]) hit = true;
      const auto nb = net.neighbors(x);
      double r = uniform01(rng) * rate;
      const Neighbor* next = nullptr;
      for (const auto& y : nb) {
        r -= y.conductance;
        if (r < 0.0) {
          next = &y;
          break;
        }
      }
      if (!next && net.killing(x) == 0.0 && !nb.empty()) next = &nb.back();
      if (!next) break;
      if (options.track_edges) crossed[next->edge] = 1;
      x = next->vertex;
    }
    if (hit) ++sample.marked_hits;
    return x;
  }

  void finish() {
    if (!options.track_edges) return;
    for (std::size_t e = 0; e < crossed.size(); ++e) {
      if (crossed[e]) sample.crossed_edges.push_back(static_cast<EdgeId>(e));
    }
  }
};

}  // namespace

CapacityReport capacity_on(const Network& net, std::span<const VertexId> set) {
  CapacityReport report;
  report.set = checked_set(net, set);
  const std::size_t n = net.vertex_count();
  std::vector<char> in_set(n, 0);
  for (VertexId x : report.set) in_set[x] = 1;

  std::vector<std::int64_t> index(n, -1);
  std::int64_t m = 0;
  for (std::size_t x = 0; x < n; ++x) {
    if (!in_set[x]) index[x] = m++;
  }
  // Hitting probability h of K, harmonic off K, 1 on K and 0 on the
  // absorbing boundary: A_cc h = C_cK 1.
  std::vector<double> hit(n, 1.0);
  if (m > 0) {
    std::vector<Eigen::Triplet<double>> triplets;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
    for (std::size_t x = 0; x < n; ++x) {
      if (index[x] < 0) continue;
      triplets.emplace_back(index[x], index[x], net.total_rate(static_cast<VertexId>(x)));
      for (const auto& y : net.neighbors(static_cast<VertexId>(x))) {
        if (in_set[y.vertex]) {
          rhs[index[x]] += y.conductance;
        } else {
          triplets.emplace_back(index[x], index[y.vertex], -y.conductance);
        }
      }
    }
    Eigen::SparseMatrix<double> a(m, m);
    a.setFromTriplets(triplets.begin(), triplets.end());
    Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg;
    cg.setTolerance(1e-13);
    cg.setMaxIterations(100000);
    cg.compute(a);
    const Eigen::VectorXd h = cg.solve(rhs);
    if (cg.info() != Eigen::Success) throw std::runtime_error("capacity solve did not converge");
    for (std::size_t x = 0; x < n; ++x) {
      if (index[x] >= 0) hit[x] = h[index[x]];
    }
  }
  for (VertexId x : report.set) {
    double flux = net.total_rate(x);
    for (const auto& y : net.neighbors(x)) flux -= y.conductance * hit[y.vertex];
    report.equilibrium.push_back(flux);
    report.escape_probability.push_back(flux / net.total_rate(x));
    report.capacity += flux;
  }
  return report;
}

CapacityReport compute_capacity(const Network& net, std::span<const VertexId> set) {
  CapacityReport report = capacity_on(net, set);
  const auto& lattice = net.lattice();
  if (!lattice) return report;
  int margin = std::numeric_limits<int>::max();
  for (VertexId x : report.set) margin = std::min(margin, boundary_distance(*lattice, x));
  report.margin = margin == std::numeric_limits<int>::max() ? -1 : margin;
  if (report.margin >= 0 && report.margin < kCapacityMargin) {
    throw CapacityError("set is within " + std::to_string(report.margin) +
                        " sites of the absorbing boundary (need " +
                        std::to_string(kCapacityMargin) + ")");
  }
  const Network larger = build_box_network(lattice->dimension, lattice->half_width + 4,
                                           lattice->conductance, lattice->killing, lattice->mode);
  std::vector<VertexId> mapped;
  for (VertexId x : report.set) {
    const auto y = larger.lattice()->vertex_at(lattice->coordinate(x));
    if (!y) throw std::logic_error("vertex missing from the enlarged box");
    mapped.push_back(*y);
  }
  report.boundary_drift = capacity_on(larger, mapped).capacity - report.capacity;
  return report;
}

std::vector<VertexId> window_vertices(const Network& box, int radius) {
  const auto& lattice = box.lattice();
  if (!lattice) throw std::invalid_argument("window needs a box network");
  std::vector<VertexId> out;
  for (VertexId x = 0; x < box.vertex_count(); ++x) {
    const auto c = lattice->coordinate(x);
    if (std::all_of(c.begin(), c.end(), [radius](int v) { return std::abs(v) <= radius; })) {
      out.push_back(x);
    }
  }
  return out;
}

StarGraph build_star_graph(int dimension, int half_width) {
  if (half_width < 1) throw std::invalid_argument("star graph needs half width >= 1");
  StarGraph star;
  star.dimension = dimension;
  star.half_width = half_width;
  star.interior = build_box_network(dimension, half_width, 1.0, 0.0, BoundaryMode::absorbing);
  double acc = 0.0;
  for (VertexId x = 0; x < star.interior.vertex_count(); ++x) {
    const double c = star.interior.killing(x);
    if (c > 0.0) {
      acc += c;
      star.entry_vertices.push_back(x);
      star.entry_cumulative.push_back(acc);
    }
  }
  star.star_rate = acc;
  return star;
}

InterlacementSample sample_interlacement_trace(const Network& net, const CapacityReport& capacity,
                                               double u, RandomStream& rng,
                                               const SamplerOptions& options) {
  if (!(u >= 0.0)) throw std::invalid_argument("level u must be non-negative");
  InterlacementSample sample;
  sample.level_u = u;
  Walker walker(net, options, sample);
  if (u > 0.0 && capacity.capacity > 0.0) {
    std::vector<double> cumulative;
    double acc = 0.0;
    for (double e : capacity.equilibrium) cumulative.push_back(acc += std::max(e, 0.0));
    const auto count = std::poisson_distribution<std::uint64_t>(u * capacity.capacity)(rng);
    for (std::uint64_t k = 0; k < count; ++k) {
      walker.run(capacity.set[draw_cumulative(cumulative, uniform01(rng))], rng);
    }
  }
  walker.finish();
  return sample;
}

InterlacementSample sample_star_excursions(const StarGraph& star, double u, RandomStream& rng,
                                           const SamplerOptions& options) {
  if (!(u >= 0.0)) throw std::invalid_argument("level u must be non-negative");
  InterlacementSample sample;
  sample.level_u = u;
  Walker walker(star.interior, options, sample);
  std::vector<char> star_crossed;
  if (options.track_edges) star_crossed.assign(star.interior_count(), 0);
  std::exponential_distribution<double> clock(star.star_rate);
  double time_at_star = 0.0;
  for (;;) {
    time_at_star += clock(rng);
    if (!(time_at_star < u)) break;
    const VertexId entry =
        star.entry_vertices[draw_cumulative(star.entry_cumulative, uniform01(rng))];
    const VertexId exit = walker.run(entry, rng);
    if (options.track_edges) {
      star_crossed[entry] = 1;
      star_crossed[exit] = 1;
    }
  }
  walker.finish();
  for (std::size_t x = 0; x < star_crossed.size(); ++x) {
    if (star_crossed[x]) sample.star_crossings.push_back(static_cast<VertexId>(x));
  }
  return sample;
}

Report interlacement_check(const InterlacementCheckOptions& options) {
  const auto& th = options.thresholds;
  const double u = options.u;
  const Network box = build_box_network(options.dimension, options.half_width, 1.0, 0.0,
                                        BoundaryMode::absorbing);
  const StarGraph star = build_star_graph(options.dimension, options.half_width);
  const auto window = window_vertices(box, options.window_radius);
  const CapacityReport window_cap = compute_capacity(box, window);

  std::vector<CapacityReport> caps;
  std::vector<std::vector<VertexId>> sets;
  for (const auto& coords : options.vacancy_sets) {
    std::vector<VertexId> set;
    for (const auto& c : coords) {
      const auto x = box.lattice()->vertex_at(c);
      if (!x) throw std::invalid_argument("vacancy set vertex outside the box");
      set.push_back(*x);
    }
    caps.push_back(compute_capacity(box, set));
    sets.push_back(std::move(set));
  }
  std::vector<char> marked(box.vertex_count(), 0);
  if (!sets.empty()) {
    for (VertexId x : sets.front()) marked[x] = 1;
  }

  struct Outcome {
    std::vector<double> occupation;
    std::vector<char> vacant;
    double hits = 0.0;
  };
  auto summarise = [&](const InterlacementSample& s) {
    Outcome o;
    for (VertexId x : window) o.occupation.push_back(s.occupation[x]);
    for (const auto& set : sets) {
      o.vacant.push_back(std::all_of(set.begin(), set.end(),
                                     [&](VertexId x) { return s.occupation[x] == 0.0; }));
    }
    o.hits = static_cast<double>(s.marked_hits);
    return o;
  };
  struct Tally {
    std::vector<RunningStats> occupation;
    std::vector<RunningStats> vacant;
    RunningStats hits;
  };
  auto tally_of = [&](Tally& t) {
    return [&t](std::uint64_t, Outcome o) {
      if (t.occupation.empty()) {
        t.occupation.resize(o.occupation.size());
        t.vacant.resize(o.vacant.size());
      }
      for (std::size_t i = 0; i < o.occupation.size(); ++i) t.occupation[i].add(o.occupation[i]);
      for (std::size_t i = 0; i < o.vacant.size(); ++i) t.vacant[i].add(o.vacant[i] ? 1.0 : 0.0);
      t.hits.add(o.hits);
    };
  };

  Tally trace, excursions;
  run_replicas(
      options.replicas, options.seed,
      [&](std::uint64_t, RandomStream& rng) {
        return summarise(sample_interlacement_trace(box, window_cap, u, rng));
      },
      tally_of(trace));
  SamplerOptions star_options;
  star_options.marked = &marked;
  run_replicas(
      options.star_replicas, options.seed ^ 0x5A5A5A5AULL,
      [&](std::uint64_t, RandomStream& rng) {
        return summarise(sample_star_excursions(star, u, rng, star_options));
      },
      tally_of(excursions));

  Report report;
  report.config["window_capacity"] = window_cap.capacity;
  auto& cap_info = report.config["vacancy_capacities"] = nlohmann::ordered_json::array();
  for (const auto& c : caps) {
    cap_info.push_back({{"capacity", c.capacity}, {"boundary_drift", c.boundary_drift},
                        {"margin", c.margin}});
  }
  for (std::size_t i = 0; i < sets.size(); ++i) {
    const double exact = std::exp(-u * caps[i].capacity);
    const std::string tag = "[" + std::to_string(i) + "]";
    const double pt = trace.vacant[i].mean();
    const double ps = excursions.vacant[i].mean();
    const double se_t = binomial_standard_error(pt, trace.vacant[i].count());
    const double se_s = binomial_standard_error(ps, excursions.vacant[i].count());
    report.add(z_record("vacancy_trace" + tag, "P(K in V^u) = exp(-u cap(K))", exact, pt, se_t,
                        z_score(pt, exact, se_t), th.max_abs_z));
    report.add(z_record("vacancy_star" + tag, "P(K in V^u) = exp(-u cap(K))", exact, ps, se_s,
                        z_score(ps, exact, se_s), th.max_abs_z));
    report.add(z_record("vacancy_agreement" + tag, "trace and star samplers agree on P(K vacant)",
                        std::nullopt, pt - ps, std::hypot(se_t, se_s),
                        two_sample_z(pt, se_t, ps, se_s), th.max_abs_z));
  }
  if (!sets.empty()) {
    const double exact = u * caps.front().capacity;
    const auto& h = excursions.hits;
    report.add(z_record("star_excursions_hitting[0]", "E[#excursions hitting K] = u cap(K)", exact,
                        h.mean(), h.standard_error(), z_score(h.mean(), exact, h.standard_error()),
                        th.max_abs_z));
  }
  for (std::size_t i = 0; i < window.size(); ++i) {
    const std::string tag = "[" + std::to_string(window[i]) + "]";
    const auto& a = trace.occupation[i];
    const auto& b = excursions.occupation[i];
    report.add(z_record("occupation_trace" + tag, "E[L^x(I^u)] = u", u, a.mean(),
                        a.standard_error(), z_score(a.mean(), u, a.standard_error()),
                        th.max_abs_z));
    report.add(z_record("occupation_star" + tag, "E[L^x_{tau_u}] = u", u, b.mean(),
                        b.standard_error(), z_score(b.mean(), u, b.standard_error()),
                        th.max_abs_z));
    report.add(z_record("occupation_agreement" + tag, "trace and star samplers agree on E[L^x]",
                        std::nullopt, a.mean() - b.mean(),
                        std::hypot(a.standard_error(), b.standard_error()),
                        two_sample_z(a.mean(), a.standard_error(), b.mean(), b.standard_error()),
                        th.max_abs_z));
  }
  return report;
}

Report isomorphism_check(const StarGraph& star, double u, std::uint64_t replicas,
                         std::uint64_t seed, const Thresholds& th) {
  if (!(u >= 0.0)) throw std::invalid_argument("level u must be non-negative");
  const GreenOperator gop(star.interior);
  const std::size_t n = star.interior_count();
  const double shift = std::sqrt(2.0 * u);

  struct Outcome {
    std::vector<double> left;
    std::vector<double> right;
  };
  std::vector<RunningStats> left1(n), left2(n), right1(n), right2(n);
  std::vector<std::vector<double>> left_samples, right_samples;
  const bool keep_samples = u == 0.0;
  if (keep_samples) {
    left_samples.assign(n, {});
    right_samples.assign(n, {});
  }
  run_replicas(
      replicas, seed,
      [&](std::uint64_t, RandomStream& rng) {
        const InterlacementSample exc = sample_star_excursions(star, u, rng);
        const FieldSample phi_prime = sample_gff(gop, rng);
        const FieldSample phi = sample_gff(gop, rng);
        Outcome o;
        o.left.resize(n);
        o.right.resize(n);
        for (std::size_t x = 0; x < n; ++x) {
          o.left[x] = exc.occupation[x] + 0.5 * phi_prime.values[x] * phi_prime.values[x];
          const double d = phi.values[x] - shift;
          o.right[x] = 0.5 * d * d;
        }
        return o;
      },
      [&](std::uint64_t, Outcome o) {
        for (std::size_t x = 0; x < n; ++x) {
          left1[x].add(o.left[x]);
          left2[x].add(o.left[x] * o.left[x]);
          right1[x].add(o.right[x]);
          right2[x].add(o.right[x] * o.right[x]);
          if (keep_samples) {
            left_samples[x].push_back(o.left[x]);
            right_samples[x].push_back(o.right[x]);
          }
        }
      });

  Report report;
  for (std::size_t x = 0; x < n; ++x) {
    const double g = gop(x, x);
    const std::string tag = "[" + std::to_string(x) + "]";
    const double mean_exact = 0.5 * g + u;
    // E[(phi - a)^4] / 4 with a^2 = 2u.
    const double second_exact = (3.0 * g * g + 12.0 * g * u + 4.0 * u * u) / 4.0;
    report.add(z_record("first_moment" + tag, "E[L^x + phi'^2/2] = E[(phi - sqrt(2u))^2/2]",
                        mean_exact, left1[x].mean(), left1[x].standard_error(),
                        two_sample_z(left1[x].mean(), left1[x].standard_error(), right1[x].mean(),
                                     right1[x].standard_error()),
                        th.max_abs_z));
    report.add(z_record("second_moment" + tag,
                        "E[(L^x + phi'^2/2)^2] = E[(phi - sqrt(2u))^4/4]", second_exact,
                        left2[x].mean(), left2[x].standard_error(),
                        two_sample_z(left2[x].mean(), left2[x].standard_error(), right2[x].mean(),
                                     right2[x].standard_error()),
                        th.max_abs_z));
    report.add(z_record("first_moment_exact" + tag, "E[L^x + phi'^2/2] = G(x,x)/2 + u",
                        mean_exact, left1[x].mean(), left1[x].standard_error(),
                        z_score(left1[x].mean(), mean_exact, left1[x].standard_error()),
                        th.max_abs_z));
    report.add(z_record("second_moment_exact" + tag,
                        "E[(L^x + phi'^2/2)^2] = (3G^2 + 12 G u + 4u^2)/4", second_exact,
                        left2[x].mean(), left2[x].standard_error(),
                        z_score(left2[x].mean(), second_exact, left2[x].standard_error()),
                        th.max_abs_z));
    if (keep_samples) {
      auto cdf = [g](double t) { return t <= 0.0 ? 0.0 : std::erf(std::sqrt(t / g)); };
      const double dl = ks_statistic(left_samples[x], cdf);
      const double dr = ks_statistic(right_samples[x], cdf);
      report.add(ks_record("left_marginal" + tag, "L^x + phi'^2/2 ~ phi_x^2/2 at u = 0", dl,
                           ks_p_value(dl, left_samples[x].size()), th.min_ks_p));
      report.add(ks_record("right_marginal" + tag, "(phi_x - 0)^2/2 ~ phi_x^2/2", dr,
                           ks_p_value(dr, right_samples[x].size()), th.min_ks_p));
    }
  }
  return report;
}

LevelSetOutcome levelset_replica(const StarGraph& star, const LoopSampler& loops, double u,
                                 RandomStream& rng) {
  if (!(u > 0.0)) throw std::invalid_argument("level u must be positive");
  const Network& net = star.interior;
  if (loops.network().vertex_count() != net.vertex_count()) {
    throw std::invalid_argument("loop sampler does not live on the star interior");
  }
  const std::size_t n = net.vertex_count();
  const VertexId hub = star.star_vertex();

  SamplerOptions options;
  options.track_edges = true;
  const InterlacementSample exc = sample_star_excursions(star, u, rng, options);
  const LoopSoupSample soup = loops.sample(0.5, rng);
  const OccupationField loop_occupation = occupation_field(soup);

  std::vector<double> total(n);
  for (std::size_t x = 0; x < n; ++x) total[x] = exc.occupation[x] + loop_occupation.values[x];

  UnionFind sets(n + 1);
  std::vector<char> open(net.edge_count(), 0);
  for (EdgeId e : exc.crossed_edges) open[e] = 1;
  for (EdgeId e : traversed_edges(soup, net)) open[e] = 1;
  std::vector<char> star_open(n, 0);
  for (VertexId x : exc.star_crossings) star_open[x] = 1;

  for (EdgeId e = 0; e < net.edge_count(); ++e) {
    const auto& edge = net.edge(e);
    if (!open[e]) {
      open[e] = uniform01(rng) < opening_probability(edge.conductance, total[edge.u], total[edge.v]);
    }
    if (open[e]) sets.unite(edge.u, edge.v);
  }
  for (VertexId x : star.entry_vertices) {
    if (!star_open[x]) {
      star_open[x] = uniform01(rng) < opening_probability(star.star_conductance(x), total[x], u);
    }
    if (star_open[x]) sets.unite(x, hub);
  }

  // Clusters in order of their smallest vertex; the hub's cluster is where
  // phi - sqrt(2u) = -sqrt(2u) < 0, the others get fair signs.
  std::vector<std::int64_t> cluster_of_root(n + 1, -1);
  std::vector<std::size_t> cluster(n + 1);
  std::size_t count = 0;
  for (VertexId x = 0; x <= hub; ++x) {
    const VertexId r = sets.find(x);
    if (cluster_of_root[r] < 0) cluster_of_root[r] = static_cast<std::int64_t>(count++);
    cluster[x] = static_cast<std::size_t>(cluster_of_root[r]);
  }
  std::vector<int> sign(count, 0);
  sign[cluster[hub]] = -1;
  std::bernoulli_distribution coin(0.5);
  for (auto& s : sign) {
    if (s == 0) s = coin(rng) ? 1 : -1;
  }

  LevelSetOutcome out;
  out.field.resize(n);
  const double level = std::sqrt(2.0 * u);
  for (std::size_t x = 0; x < n; ++x) {
    const double phi = level + sign[cluster[x]] * std::sqrt(2.0 * total[x]);
    out.field[x] = phi;
    const bool visited = exc.occupation[x] > 0.0;
    if (visited && !(phi < level)) ++out.violations;
    if (phi > level) {
      ++out.above_level;
      if (!visited) ++out.above_level_vacant;
    }
  }
  return out;
}

Report levelset_containment_check(const StarGraph& star, double u, std::uint64_t replicas,
                                  std::uint64_t seed, const Thresholds& th,
                                  double length_cutoff_eps) {
  const GreenOperator gop(star.interior);
  const LoopSampler loops(star.interior, gop, length_cutoff_eps);
  const std::size_t n = star.interior_count();
  std::size_t violations = 0, above = 0, above_vacant = 0;
  std::vector<RunningStats> first(n), second(n);
  run_replicas(
      replicas, seed,
      [&](std::uint64_t, RandomStream& rng) { return levelset_replica(star, loops, u, rng); },
      [&](std::uint64_t, LevelSetOutcome o) {
        violations += o.violations;
        above += o.above_level;
        above_vacant += o.above_level_vacant;
        for (std::size_t x = 0; x < n; ++x) {
          first[x].add(o.field[x]);
          second[x].add(o.field[x] * o.field[x]);
        }
      });

  Report report;
  report.add(count_record("containment_violations",
                          "visited vertices satisfy phi < sqrt(2u)", 0.0,
                          static_cast<double>(violations)));
  TestRecord vacant;
  vacant.id = "level_set_in_vacant_set";
  vacant.formula = "{phi > sqrt(2u)} is contained in V^u";
  vacant.exact = 1.0;
  vacant.estimate = above > 0 ? static_cast<double>(above_vacant) / static_cast<double>(above) : 1.0;
  vacant.pass = above_vacant == above;
  report.add(vacant);
  for (std::size_t x = 0; x < n; ++x) {
    const std::string tag = "[" + std::to_string(x) + "]";
    const double g = gop(x, x);
    report.add(z_record("field_mean" + tag, "E[phi_x] = 0", 0.0, first[x].mean(),
                        first[x].standard_error(),
                        z_score(first[x].mean(), 0.0, first[x].standard_error()), th.max_abs_z));
    report.add(z_record("field_variance" + tag, "E[phi_x^2] = G(x,x)", g, second[x].mean(),
                        second[x].standard_error(),
                        z_score(second[x].mean(), g, second[x].standard_error()), th.max_abs_z));
  }
  return report;
}

}  // namespace loopfield

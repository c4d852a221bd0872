#include <doctest.h>

#include <cmath>

#include <Eigen/Dense>

#include "loopfield/interlacement.hpp"
#include "loopfield/replicas.hpp"

using namespace loopfield;

namespace {

// e_K = (G_KK)^{-1} 1
Eigen::VectorXd equilibrium_oracle(const Network& net, const std::vector<VertexId>& set) {
  const GreenOperator gop(net);
  const auto k = static_cast<Eigen::Index>(set.size());
  Eigen::MatrixXd gk(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) gk(i, j) = gop(set[i], set[j]);
  }
  return gk.ldlt().solve(Eigen::VectorXd::Ones(k));
}

VertexId at(const Network& box, std::vector<int> c) { return *box.lattice()->vertex_at(c); }

}  // namespace

TEST_CASE("capacity against the Green-matrix oracle") {
  const Network box = build_box_network(3, 4, 1.0, 0.0, BoundaryMode::absorbing);
  const std::vector<std::vector<VertexId>> sets = {
      {at(box, {0, 0, 0})},
      {at(box, {0, 0, 0}), at(box, {1, 0, 0})},
      {at(box, {-1, 0, 1}), at(box, {1, 1, 0}), at(box, {0, 0, 0})}};
  for (const auto& set : sets) {
    const CapacityReport cap = compute_capacity(box, set);
    std::vector<VertexId> sorted = set;
    std::sort(sorted.begin(), sorted.end());
    const Eigen::VectorXd e = equilibrium_oracle(box, sorted);
    REQUIRE(cap.set == sorted);
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      CHECK(cap.equilibrium[i] == doctest::Approx(e[i]).epsilon(1e-9));
      CHECK(cap.escape_probability[i] ==
            doctest::Approx(e[i] / box.total_rate(sorted[i])).epsilon(1e-9));
      CHECK(cap.escape_probability[i] > 0.0);
      CHECK(cap.escape_probability[i] < 1.0);
    }
    CHECK(cap.capacity == doctest::Approx(e.sum()).epsilon(1e-9));
    CHECK(cap.margin >= kCapacityMargin);
    CHECK(std::isfinite(cap.boundary_drift));
    CHECK(cap.boundary_drift < 0.0);
  }
}

TEST_CASE("capacity preconditions") {
  const Network box = build_box_network(2, 3, 1.0, 0.0, BoundaryMode::absorbing);
  CHECK_THROWS_AS(compute_capacity(box, std::vector<VertexId>{}), CapacityError);
  CHECK_THROWS_AS(compute_capacity(box, std::vector<VertexId>{at(box, {2, 0})}), CapacityError);
  const VertexId o = at(box, {0, 0});
  CHECK_THROWS_AS(compute_capacity(box, std::vector<VertexId>{o, o}), CapacityError);
  CHECK_NOTHROW(capacity_on(box, std::vector<VertexId>{at(box, {2, 0})}));
}

TEST_CASE("star graph") {
  for (auto [d, n] : {std::pair{2, 5}, std::pair{3, 8}, std::pair{2, 1}}) {
    const StarGraph star = build_star_graph(d, n);
    CHECK(star.star_rate == 2.0 * d * std::pow(2 * n - 1, d - 1));
    CHECK(star.interior_count() == static_cast<std::size_t>(std::pow(2 * n - 1, d)));
    CHECK(star.entry_cumulative.back() == star.star_rate);
  }
  const Network box = build_box_network(3, 4, 1.0, 0.0, BoundaryMode::absorbing);
  CHECK(window_vertices(box, 2).size() == 125);
}

TEST_CASE("level zero is empty") {
  const StarGraph star = build_star_graph(2, 3);
  RandomStream rng = derive_stream(1, 0);
  const auto s = sample_star_excursions(star, 0.0, rng);
  CHECK(s.trajectory_count == 0);
  for (double l : s.occupation) CHECK(l == 0.0);
}

TEST_CASE("both samplers have occupation mean u") {
  const StarGraph star = build_star_graph(2, 3);
  const Network& box = star.interior;
  std::vector<VertexId> all(box.vertex_count());
  for (VertexId x = 0; x < all.size(); ++x) all[x] = x;
  const CapacityReport cap = capacity_on(box, all);
  const double u = 0.8;
  std::vector<RunningStats> trace(all.size()), exc(all.size());
  SamplerOptions paths;
  paths.record_paths = true;
  run_replicas(
      20000, 2,
      [&](std::uint64_t, RandomStream& rng) {
        auto a = sample_interlacement_trace(box, cap, u, rng, paths);
        auto b = sample_star_excursions(star, u, rng, paths);
        for (const auto& s : {a, b}) {
          REQUIRE(s.trajectories.size() == s.trajectory_count);
          std::vector<double> occ(all.size(), 0.0);
          for (const auto& t : s.trajectories) {
            for (std::size_t i = 0; i < t.vertices.size(); ++i) occ[t.vertices[i]] += t.holding_times[i];
            for (std::size_t i = 0; i + 1 < t.vertices.size(); ++i) {
              REQUIRE(box.find_edge(t.vertices[i], t.vertices[i + 1]));
            }
          }
          for (VertexId x = 0; x < all.size(); ++x) {
            REQUIRE(occ[x] == doctest::Approx(s.occupation[x]).epsilon(1e-12));
          }
        }
        return std::pair{a.occupation, b.occupation};
      },
      [&](std::uint64_t, std::pair<std::vector<double>, std::vector<double>> v) {
        for (VertexId x = 0; x < all.size(); ++x) {
          trace[x].add(v.first[x]);
          exc[x].add(v.second[x]);
        }
      });
  for (VertexId x = 0; x < all.size(); ++x) {
    CHECK(std::abs(z_score(trace[x].mean(), u, trace[x].standard_error())) < 3.9);
    CHECK(std::abs(z_score(exc[x].mean(), u, exc[x].standard_error())) < 3.9);
  }
}

TEST_CASE("small interlacement check passes") {
  InterlacementCheckOptions options;
  options.dimension = 2;
  options.half_width = 6;
  options.window_radius = 1;
  options.u = 0.5;
  options.vacancy_sets = {{{0, 0}}, {{0, 0}, {0, 1}}};
  options.replicas = 20000;
  options.star_replicas = 5000;
  const Report report = interlacement_check(options);
  for (const auto& t : report.tests) {
    INFO(t.id);
    CHECK(t.pass);
  }
}

TEST_CASE("isomorphism on a small star graph") {
  const StarGraph star = build_star_graph(2, 2);
  for (double u : {0.0, 0.7}) {
    const Report report = isomorphism_check(star, u, 20000, 4);
    CHECK(!report.tests.empty());
    for (const auto& t : report.tests) {
      INFO(t.id);
      CHECK(t.pass);
    }
  }
}

TEST_CASE("level-set coupling never puts a visited vertex above the level") {
  const StarGraph star = build_star_graph(2, 3);
  const LoopSampler loops(star.interior);
  RandomStream rng = derive_stream(8, 0);
  std::size_t above = 0;
  for (int i = 0; i < 2000; ++i) {
    const LevelSetOutcome o = levelset_replica(star, loops, 0.3, rng);
    CHECK(o.violations == 0);
    CHECK(o.above_level_vacant == o.above_level);
    above += o.above_level;
  }
  CHECK(above > 0);
  const Report report = levelset_containment_check(star, 0.3, 5000, 9);
  for (const auto& t : report.tests) {
    INFO(t.id);
    CHECK(t.pass);
  }
}

#include <doctest.h>

#include <cmath>

#include "loopfield/coupling.hpp"

using namespace loopfield;

TEST_CASE("opening probability") {
  CHECK(opening_probability(1.0, 1.0, 1.0) == doctest::Approx(1.0 - std::exp(-2.0)));
  CHECK(opening_probability(0.5, 4.0, 1.0) == doctest::Approx(1.0 - std::exp(-2.0)));
  CHECK(opening_probability(2.0, 0.0, 3.0) == 0.0);
}

TEST_CASE("coupling needs intensity one half") {
  const Network net = build_path_network(2, 1.0, 1.0);
  const LoopSampler s(net);
  RandomStream rng = derive_stream(1, 0);
  CHECK_THROWS_AS(couple(net, s.sample(1.0, rng), rng), std::invalid_argument);
}

TEST_CASE("coupled field is constant in sign on clusters and squares to 2L") {
  const Network net = build_box_network(2, 2, 1.0, 0.0, BoundaryMode::absorbing);
  const LoopSampler s(net);
  RandomStream rng = derive_stream(9, 0);
  for (int i = 0; i < 2000; ++i) {
    const CoupledSample cs = couple(net, s.sample(0.5, rng), rng);
    CHECK(sign_violations(cs) == 0);
    CHECK(refines(cs.base_clusters, cs.merged_clusters));
    CHECK(cs.signs.size() == cs.merged_clusters.cluster_count());
    for (VertexId x = 0; x < net.vertex_count(); ++x) {
      const double phi = cs.field.values[x];
      CHECK(phi * phi / 2.0 == doctest::Approx(cs.occupation.values[x]).epsilon(1e-12));
      CHECK((phi > 0.0 ? 1 : -1) == cs.signs[cs.merged_clusters.cluster_of[x]]);
    }
  }
}

TEST_CASE("coupled field passes the free-field law checks") {
  const Network net = build_path_network(3, 1.0, 1.0);
  const GreenOperator gop(net);
  CouplingCheckOptions options;
  options.replicas = 100000;
  options.seed = 17;
  const Report report = verify_gff_law(net, gop, options);
  CHECK(report.tests.size() > 5);
  for (const auto& t : report.tests) {
    INFO(t.id);
    CHECK(t.pass);
  }
}

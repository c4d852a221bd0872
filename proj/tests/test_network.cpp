#include <doctest.h>

#include <cmath>
#include <limits>

#include "loopfield/network.hpp"
#include "loopfield/network_io.hpp"

using namespace loopfield;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

Network two_vertex() { return Network::create(2, {{0, 1, 1.0}}, {1.0, 1.0}); }

}  // namespace

TEST_CASE("two-vertex rates and jump probabilities") {
  const Network net = two_vertex();
  CHECK(net.total_rate(0) == 2.0);
  CHECK(net.total_rate(1) == 2.0);
  CHECK(net.jump_probability(0, 1) == 0.5);
  CHECK(net.kill_probability(0) == 0.5);
  CHECK(net.edge_length(0) == 0.5);
  REQUIRE(net.find_edge(1, 0));
  CHECK(*net.find_edge(1, 0) == 0);
}

TEST_CASE("absorbing box keeps the interior") {
  const Network box = build_box_network(2, 2, 1.0, 0.0, BoundaryMode::absorbing);
  CHECK(box.vertex_count() == 9);
  CHECK(box.absorbed_count() == 16);
  CHECK(box.edge_count() == 12);
  const auto& lat = *box.lattice();
  const int corner[] = {-1, -1};
  const int side[] = {-1, 0};
  const int centre[] = {0, 0};
  CHECK(box.killing(*lat.vertex_at(corner)) == 2.0);
  CHECK(box.killing(*lat.vertex_at(side)) == 1.0);
  CHECK(box.killing(*lat.vertex_at(centre)) == 0.0);
  for (VertexId x = 0; x < box.vertex_count(); ++x) CHECK(box.total_rate(x) == 4.0);
}

TEST_CASE("lattice numbering is row-major with the last coordinate fastest") {
  const Network box = build_box_network(2, 1, 1.0, 0.5, BoundaryMode::killed_uniform);
  REQUIRE(box.vertex_count() == 9);
  const auto& lat = *box.lattice();
  CHECK(lat.coordinate(0)[0] == -1);
  CHECK(lat.coordinate(0)[1] == -1);
  CHECK(lat.coordinate(1)[0] == -1);
  CHECK(lat.coordinate(1)[1] == 0);
  CHECK(lat.coordinate(3)[0] == 0);
  for (VertexId x = 0; x < 9; ++x) CHECK(*lat.vertex_at(lat.coordinate(x)) == x);
  const int outside[] = {2, 0};
  CHECK_FALSE(lat.vertex_at(outside));
}

TEST_CASE("half-plane box absorbs only below the floor") {
  const Network box = build_box_network(2, 2, 1.0, 0.0, BoundaryMode::halfplane_floor);
  CHECK(box.absorbed_count() > 0);
  CHECK(box.vertex_count() + box.absorbed_count() == 25);
}

TEST_CASE("recurrent networks are rejected") {
  CHECK_THROWS_AS(Network::create(2, {{0, 1, 1.0}}, {0.0, 0.0}), NetworkError);
  CHECK_THROWS_AS(build_box_network(2, 2, 1.0, 0.0, BoundaryMode::killed_uniform), NetworkError);
}

TEST_CASE("malformed input") {
  CHECK_THROWS_AS(Network::create(2, {{0, 0, 1.0}}, {1.0, 1.0}), NetworkError);
  CHECK_THROWS_AS(Network::create(2, {{0, 1, -1.0}}, {1.0, 1.0}), NetworkError);
  CHECK_THROWS_AS(Network::create(2, {{0, 2, 1.0}}, {1.0, 1.0}), NetworkError);
  CHECK_THROWS_AS(Network::create(2, {{0, 1, 1.0}, {1, 0, 2.0}}, {1.0, 1.0}), NetworkError);
  CHECK_THROWS_AS(Network::create(2, {{0, 1, 1.0}}, {1.0}), NetworkError);
  CHECK_THROWS_AS(Network::create(2, {{0, 1, 1.0}}, {-1.0, 1.0}), NetworkError);
  CHECK_THROWS_AS(Network::create(3, {{0, 1, 1.0}}, {1.0, 1.0, 1.0}), NetworkError);
}

TEST_CASE("infinite killing is eliminated into the neighbours") {
  const Network net = Network::create(3, {{0, 1, 1.0}, {1, 2, 3.0}}, {kInf, 0.0, kInf});
  CHECK(net.vertex_count() == 1);
  CHECK(net.absorbed_count() == 2);
  CHECK(net.killing(0) == 4.0);
  CHECK(net.input_index()[1] == 0);
  CHECK(net.input_index()[0] == -1);
}

TEST_CASE("removing an edge moves its conductance to the killing") {
  const Network net = two_vertex();
  const EdgeId removed[] = {0};
  const Network mod = modified_network(net, removed);
  CHECK(mod.vertex_count() == 2);
  CHECK(mod.edge_count() == 0);
  CHECK(mod.killing(0) == 2.0);
  CHECK(mod.killing(1) == 2.0);

  const Network path = build_path_network(3, 1.5, 0.25);
  const EdgeId first[] = {0};
  const Network p2 = modified_network(path, first);
  CHECK(p2.edge_count() == 1);
  CHECK(p2.killing(0) == 1.75);
  CHECK(p2.killing(1) == 1.75);
  CHECK(p2.killing(2) == 0.25);
  for (VertexId x = 0; x < 3; ++x) CHECK(p2.total_rate(x) == path.total_rate(x));
}

TEST_CASE("json round trip is exact") {
  const Network net = Network::create(
      3, {{0, 1, 0.1}, {1, 2, 1.0 / 3.0}}, {std::nextafter(1.0, 2.0), 0.0, 2.0 / 7.0});
  const auto text = network_to_json(net).dump();
  const Network back = network_from_json(nlohmann::json::parse(text));
  REQUIRE(back.vertex_count() == 3);
  REQUIRE(back.edge_count() == 2);
  for (EdgeId e = 0; e < 2; ++e) {
    CHECK(back.edge(e).u == net.edge(e).u);
    CHECK(back.edge(e).v == net.edge(e).v);
    CHECK(back.edge(e).conductance == net.edge(e).conductance);
  }
  for (VertexId x = 0; x < 3; ++x) CHECK(back.killing(x) == net.killing(x));
}

TEST_CASE("json accepts inf killing and reports bad fields") {
  const auto doc = nlohmann::json::parse(
      R"({"vertices": 3, "edges": [[0, 1, 1], [1, 2, 1]], "killing": ["inf", 0, "inf"]})");
  const Network net = network_from_json(doc);
  CHECK(net.vertex_count() == 1);
  CHECK(net.killing(0) == 2.0);
  CHECK_THROWS_AS(network_from_json(nlohmann::json::parse(R"({"vertices": 2})")), NetworkError);
  CHECK_THROWS_AS(network_from_json(nlohmann::json::parse(
                      R"({"vertices": 2, "edges": [[0, 1]], "killing": [1, 1]})")),
                  NetworkError);
}

TEST_CASE("network specs") {
  const Network grid = network_from_spec(nlohmann::json::parse(
      R"({"grid": {"shape": [4, 4], "C": 1, "kappa": 0.1}})"));
  CHECK(grid.vertex_count() == 16);
  CHECK(grid.edge_count() == 24);
  const Network box = network_from_spec(
      nlohmann::json::parse(R"({"box": {"d": 3, "n": 2, "mode": "absorbing"}})"));
  CHECK(box.vertex_count() == 27);
  CHECK(parse_boundary_mode(to_string(BoundaryMode::halfplane_floor)) ==
        BoundaryMode::halfplane_floor);
  CHECK_THROWS_AS(parse_boundary_mode("periodic"), NetworkError);
}

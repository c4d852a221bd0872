#include <doctest.h>

#include <cmath>
#include <vector>

#include <Eigen/Cholesky>

#include "loopfield/green.hpp"

using namespace loopfield;

namespace {

using Dense = std::vector<std::vector<double>>;

Dense energy_oracle(const Network& net) {
  const std::size_t n = net.vertex_count();
  Dense a(n, std::vector<double>(n, 0.0));
  for (std::size_t x = 0; x < n; ++x) a[x][x] = net.killing(x);
  for (const auto& e : net.edges()) {
    a[e.u][e.u] += e.conductance;
    a[e.v][e.v] += e.conductance;
    a[e.u][e.v] -= e.conductance;
    a[e.v][e.u] -= e.conductance;
  }
  return a;
}

// Gauss-Jordan with partial pivoting; returns the inverse and accumulates det.
Dense invert(Dense a, double& det) {
  const std::size_t n = a.size();
  Dense inv(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0;
  det = 1.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(a[r][c]) > std::abs(a[p][c])) p = r;
    }
    if (p != c) {
      std::swap(a[p], a[c]);
      std::swap(inv[p], inv[c]);
      det = -det;
    }
    const double pivot = a[c][c];
    det *= pivot;
    for (std::size_t k = 0; k < n; ++k) {
      a[c][k] /= pivot;
      inv[c][k] /= pivot;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = a[r][c];
      for (std::size_t k = 0; k < n; ++k) {
        a[r][k] -= f * a[c][k];
        inv[r][k] -= f * inv[c][k];
      }
    }
  }
  return inv;
}

Network two_vertex() { return build_path_network(2, 1.0, 1.0); }

}  // namespace

TEST_CASE("two-vertex Green matrix") {
  const GreenOperator gop(two_vertex());
  CHECK(gop(0, 0) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(gop(1, 1) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(gop(0, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(normalized_green(gop, 0, 1) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(normalized_green(gop, 1, 1) == 1.0);
  CHECK(gop.log_det_green() == doctest::Approx(-std::log(3.0)).epsilon(1e-14));
}

TEST_CASE("Cholesky factor reproduces G") {
  const GreenOperator gop(build_box_network(2, 2, 1.0, 0.3, BoundaryMode::killed_uniform));
  const Eigen::MatrixXd back = gop.chol() * gop.chol().transpose();
  CHECK((back - gop.green()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("Green matrix against a dense elimination oracle") {
  for (const Network& net : {build_path_network(3, 1.0, 1.0),
                             Network::create(3, {{0, 1, 0.7}, {1, 2, 2.5}, {0, 2, 0.2}},
                                             {0.1, 0.0, 0.4})}) {
    double det = 0.0;
    const Dense g = invert(energy_oracle(net), det);
    const GreenOperator gop(net);
    for (VertexId x = 0; x < 3; ++x) {
      for (VertexId y = 0; y < 3; ++y) CHECK(gop(x, y) == doctest::Approx(g[x][y]).epsilon(1e-12));
    }
    CHECK(log_det_energy(net) == doctest::Approx(std::log(det)).epsilon(1e-12));
  }
}

TEST_CASE("square-root determinant ratio") {
  const EdgeId e0[] = {0};
  CHECK(sqrt_det_ratio(two_vertex(), e0) == doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-14));
  CHECK(sqrt_det_ratio(two_vertex(), {}) == 1.0);

  const Network path = build_path_network(3, 1.0, 1.0);
  double det = 0.0, det_mod = 0.0;
  invert(energy_oracle(path), det);
  invert(energy_oracle(modified_network(path, e0)), det_mod);
  CHECK(sqrt_det_ratio(path, e0) == doctest::Approx(std::sqrt(det / det_mod)).epsilon(1e-12));
}

TEST_CASE("determinant ratio decreases along nested edge sets") {
  const Network grid = build_box_network(2, 1, 1.0, 0.2, BoundaryMode::killed_uniform);
  std::vector<EdgeId> removed;
  double previous = 1.0;
  for (EdgeId e = 0; e < grid.edge_count(); ++e) {
    removed.push_back(e);
    const double r = sqrt_det_ratio(grid, removed);
    CHECK(r <= previous * (1.0 + 1e-12));
    CHECK(r > 0.0);
    previous = r;
  }
}

TEST_CASE("near-recurrent networks fail loudly") {
  const Network net = build_path_network(4, 1.0, 1e-15);
  CHECK_THROWS_AS(GreenOperator{net}, GreenError);
}

TEST_CASE("cable Green function") {
  const Network net = two_vertex();
  const GreenOperator gop(net);
  const double rho = net.edge_length(0);
  CHECK(rho == 0.5);
  CHECK(interpolated_green(gop, net, {0, 0.25}, {0, 0.25}) == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(interpolated_green(gop, net, {0, 0.0}, {0, rho}) == doctest::Approx(gop(0, 1)));
  CHECK(interpolated_green(gop, net, {0, rho}, {0, rho}) == doctest::Approx(gop(1, 1)));
  CHECK_THROWS_AS(interpolated_green(gop, net, {0, 0.6}, {0, 0.1}), std::out_of_range);

  // Symmetric, and restricted to vertices equal to G.
  const Network grid = build_box_network(2, 1, 1.3, 0.4, BoundaryMode::killed_uniform);
  const GreenOperator g2(grid);
  for (EdgeId e = 0; e < grid.edge_count(); ++e) {
    const auto& edge = grid.edge(e);
    const double r = grid.edge_length(e);
    CHECK(interpolated_green(g2, grid, {e, 0.0}, {0, 0.0}) ==
          doctest::Approx(g2(edge.u, grid.edge(0).u)).epsilon(1e-14));
    CHECK(interpolated_green(g2, grid, {e, r}, {0, 0.0}) ==
          doctest::Approx(g2(edge.v, grid.edge(0).u)).epsilon(1e-14));
    const double a = interpolated_green(g2, grid, {e, 0.3 * r}, {0, 0.1});
    const double b = interpolated_green(g2, grid, {0, 0.1}, {e, 0.3 * r});
    CHECK(a == doctest::Approx(b).epsilon(1e-14));
  }
}

TEST_CASE("cable Green function is the Brownian bridge covariance inside an edge") {
  // Kernel on interior points of one cable must be positive definite.
  const Network net = build_path_network(2, 0.8, 0.5);
  const GreenOperator gop(net);
  const double rho = net.edge_length(0);
  const int m = 12;
  Eigen::MatrixXd k(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      k(i, j) = interpolated_green(gop, net, {0, rho * (i + 0.5) / m}, {0, rho * (j + 0.5) / m});
    }
  }
  Eigen::LLT<Eigen::MatrixXd> llt(k);
  CHECK(llt.info() == Eigen::Success);
}

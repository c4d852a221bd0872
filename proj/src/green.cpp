#include "loopfield/green.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Cholesky>

namespace loopfield {

namespace {

constexpr double kPivotTolerance = 1e-12;

Eigen::LLT<Eigen::MatrixXd> checked_cholesky(const Eigen::MatrixXd& a) {
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) {
    throw GreenError("energy matrix is not positive definite (recurrent or degenerate network)");
  }
  const Eigen::MatrixXd l = llt.matrixL();
  const double largest = a.diagonal().maxCoeff();
  const double smallest_pivot = l.diagonal().array().square().minCoeff();
  if (!(smallest_pivot > kPivotTolerance * largest)) {
    throw GreenError("energy matrix is numerically singular: pivot " +
                     std::to_string(smallest_pivot) + " vs diagonal " + std::to_string(largest));
  }
  return llt;
}

}  // namespace

Eigen::MatrixXd energy_matrix(const Network& net) {
  const auto n = static_cast<Eigen::Index>(net.vertex_count());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index x = 0; x < n; ++x) a(x, x) = net.total_rate(static_cast<VertexId>(x));
  for (const auto& e : net.edges()) {
    a(e.u, e.v) -= e.conductance;
    a(e.v, e.u) -= e.conductance;
  }
  return a;
}

double log_det_energy(const Network& net) {
  const auto llt = checked_cholesky(energy_matrix(net));
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

GreenOperator::GreenOperator(const Network& net) : matrix_a_(loopfield::energy_matrix(net)) {
  const auto n = matrix_a_.rows();
  const auto llt = checked_cholesky(matrix_a_);
  log_det_g_ = -2.0 * llt.matrixLLT().diagonal().array().log().sum();
  green_ = llt.solve(Eigen::MatrixXd::Identity(n, n));
  // Symmetrise away the round-off of the triangular solves.
  green_ = 0.5 * (green_ + green_.transpose()).eval();
  Eigen::LLT<Eigen::MatrixXd> g_llt(green_);
  if (g_llt.info() != Eigen::Success) throw GreenError("Green matrix is not positive definite");
  chol_ = g_llt.matrixL();
}

GreenOperator compute_green(const Network& net) { return GreenOperator(net); }

double normalized_green(const GreenOperator& gop, VertexId x, VertexId y) {
  if (x >= gop.size() || y >= gop.size()) throw std::out_of_range("vertex out of range");
  if (x == y) return 1.0;
  return gop(x, y) / std::sqrt(gop(x, x) * gop(y, y));
}

double sqrt_det_ratio(const Network& net, std::span<const EdgeId> removed_edges) {
  if (removed_edges.empty()) return 1.0;
  const Network modified = modified_network(net, removed_edges);
  // log det G = -log det A
  return std::exp(0.5 * (log_det_energy(net) - log_det_energy(modified)));
}

double interpolated_green(const GreenOperator& gop, const Network& net, EdgePoint p1,
                          EdgePoint p2) {
  const auto& e1 = net.edge(p1.edge);
  const auto& e2 = net.edge(p2.edge);
  const double rho1 = net.edge_length(p1.edge);
  const double rho2 = net.edge_length(p2.edge);
  if (!(p1.r >= 0.0 && p1.r <= rho1) || !(p2.r >= 0.0 && p2.r <= rho2)) {
    throw std::out_of_range("cable point outside [0, rho(e)]");
  }
  const double r1 = p1.r, r2 = p2.r;
  double value = ((rho1 - r1) * (rho2 - r2) * gop(e1.u, e2.u) + r1 * r2 * gop(e1.v, e2.v) +
                  r1 * (rho2 - r2) * gop(e1.v, e2.u) + (rho1 - r1) * r2 * gop(e1.u, e2.v)) /
                 (rho1 * rho2);
  if (p1.edge == p2.edge) value += 2.0 * (std::min(r1, r2) - r1 * r2 / rho1);
  return value;
}

}  // namespace loopfield

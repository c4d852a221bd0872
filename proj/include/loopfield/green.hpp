#pragma once

#include <span>
#include <stdexcept>

#include <Eigen/Core>

#include "loopfield/network.hpp"

namespace loopfield {

class GreenError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dense energy form A = diag(lambda) - C, its inverse G and a Cholesky
/// factor of G. Immutable after construction.
class GreenOperator {
 public:
  explicit GreenOperator(const Network& net);

  std::size_t size() const { return static_cast<std::size_t>(green_.rows()); }
  const Eigen::MatrixXd& energy_matrix() const { return matrix_a_; }
  const Eigen::MatrixXd& green() const { return green_; }
  /// Lower-triangular L with L L^T = G.
  const Eigen::MatrixXd& chol() const { return chol_; }
  double log_det_green() const { return log_det_g_; }

  double operator()(VertexId x, VertexId y) const { return green_(x, y); }

 private:
  Eigen::MatrixXd matrix_a_;
  Eigen::MatrixXd green_;
  Eigen::MatrixXd chol_;
  double log_det_g_ = 0.0;
};

Eigen::MatrixXd energy_matrix(const Network& net);

/// log det A through a Cholesky factorisation; throws GreenError when the
/// smallest pivot is below 1e-12 of the largest diagonal entry.
double log_det_energy(const Network& net);

GreenOperator compute_green(const Network& net);

/// g(x, y) = G(x, y) / sqrt(G(x, x) G(y, y))
double normalized_green(const GreenOperator& gop, VertexId x, VertexId y);

/// sqrt(det G^(e) / det G): the probability that no loop of the soup at
/// intensity 1/2 crosses any of the removed edges.
double sqrt_det_ratio(const Network& net, std::span<const EdgeId> removed_edges);

/// Point on a cable, at distance r in [0, rho(e)] from the edge's first endpoint.
struct EdgePoint {
  EdgeId edge;
  double r;
};

/// Green's function of the cable system between two cable points.
double interpolated_green(const GreenOperator& gop, const Network& net, EdgePoint p1,
                          EdgePoint p2);

}  // namespace loopfield

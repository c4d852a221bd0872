#include "loopfield/loop_soup.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace loopfield {

namespace {

// Powers beyond this many bytes of cache are refused.
constexpr double kMaxCacheBytes = 2.0e9;

std::size_t draw_index(const std::vector<double>& cumulative, double u) {
  const double target = u * cumulative.back();
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
  return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()),
                               cumulative.size() - 1);
}

}  // namespace

LoopSampler::LoopSampler(const Network& net, const GreenOperator& gop, double length_cutoff_eps)
    : net_(net), eps_(length_cutoff_eps) {
  build(-gop.log_det_green());
}

LoopSampler::LoopSampler(const Network& net, double length_cutoff_eps)
    : net_(net), eps_(length_cutoff_eps) {
  build(log_det_energy(net));
}

void LoopSampler::build(double log_det_a) {
  if (!(eps_ > 0.0 && eps_ < 1.0)) throw std::invalid_argument("length cutoff must be in (0, 1)");
  const auto n = static_cast<Eigen::Index>(net_.vertex_count());
  jump_ = Eigen::MatrixXd::Zero(n, n);
  for (const auto& e : net_.edges()) {
    jump_(e.u, e.v) = e.conductance / net_.total_rate(e.u);
    jump_(e.v, e.u) = e.conductance / net_.total_rate(e.v);
  }
  double log_rates = 0.0;
  for (Eigen::Index x = 0; x < n; ++x) log_rates += std::log(net_.total_rate(static_cast<VertexId>(x)));
  total_mass_ = std::max(0.0, log_rates - log_det_a);

  powers_.clear();
  powers_.push_back(Eigen::MatrixXd::Identity(n, n));
  if (net_.edge_count() == 0) {
    spectral_radius_ = 0.0;
    total_mass_ = 0.0;
    return;
  }

  // P = D^{-1} W is similar to the symmetric D^{-1/2} W D^{-1/2}.
  Eigen::MatrixXd sym = Eigen::MatrixXd::Zero(n, n);
  for (const auto& e : net_.edges()) {
    const double s = e.conductance / std::sqrt(net_.total_rate(e.u) * net_.total_rate(e.v));
    sym(e.u, e.v) = s;
    sym(e.v, e.u) = s;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym, Eigen::EigenvaluesOnly);
  spectral_radius_ = eig.eigenvalues().cwiseAbs().maxCoeff();
  if (!(spectral_radius_ < 1.0)) {
    throw std::runtime_error("loop length truncation failed: spectral radius of P is >= 1");
  }

  const double rho = spectral_radius_;
  const double bytes_per_power = 8.0 * static_cast<double>(n) * static_cast<double>(n);
  length_cumulative_.clear();
  root_cumulative_.assign(2, {});
  powers_.push_back(jump_);
  truncated_mass_ = 0.0;
  for (std::size_t len = 2;; ++len) {
    if (bytes_per_power * static_cast<double>(len + 1) > kMaxCacheBytes) {
      throw std::runtime_error("loop length truncation failed: power cache too large");
    }
    powers_.push_back(jump_ * powers_.back());
    const Eigen::MatrixXd& pw = powers_.back();
    std::vector<double> roots(static_cast<std::size_t>(n));
    double acc = 0.0;
    for (Eigen::Index x = 0; x < n; ++x) {
      acc += std::max(0.0, pw(x, x));
      roots[static_cast<std::size_t>(x)] = acc;
    }
    const double weight = acc / static_cast<double>(len);
    truncated_mass_ += weight;
    length_cumulative_.push_back(truncated_mass_);
    root_cumulative_.push_back(std::move(roots));
    tail_bound_ = static_cast<double>(n) * std::pow(rho, static_cast<double>(len + 1)) /
                  (static_cast<double>(len + 1) * (1.0 - rho));
    if (tail_bound_ < eps_ * total_mass_) break;
  }
}

double LoopSampler::tail_mass() const { return std::max(0.0, total_mass_ - truncated_mass_); }

VertexId LoopSampler::draw_root(std::size_t length, double u) const {
  return static_cast<VertexId>(draw_index(root_cumulative_[length], u));
}

LoopSkeleton LoopSampler::draw_skeleton(std::size_t length, RandomStream& rng) const {
  LoopSkeleton loop;
  loop.vertices.reserve(length);
  const VertexId root = draw_root(length, uniform01(rng));
  loop.vertices.push_back(root);
  VertexId current = root;
  std::vector<double> cumulative;
  // Bridge of the jump chain: from x_i pick y with weight
  // P(x_i, y) (P^{n-i-1})(y, root).
  for (std::size_t i = 0; i + 1 < length; ++i) {
    const Eigen::MatrixXd& remaining = powers_[length - i - 1];
    const auto nb = net_.neighbors(current);
    cumulative.clear();
    double acc = 0.0;
    for (const auto& y : nb) {
      acc += jump_(current, y.vertex) * remaining(y.vertex, root);
      cumulative.push_back(acc);
    }
    if (!(acc > 0.0)) throw std::runtime_error("loop bridge has no admissible continuation");
    current = nb[draw_index(cumulative, uniform01(rng))].vertex;
    loop.vertices.push_back(current);
  }
  return loop;
}

LoopSoupSample LoopSampler::sample(double alpha, RandomStream& rng) const {
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  LoopSoupSample soup;
  soup.alpha = alpha;
  const std::size_t n = net_.vertex_count();
  if (truncated_mass_ > 0.0) {
    const auto count = std::poisson_distribution<std::uint64_t>(alpha * truncated_mass_)(rng);
    soup.loops.reserve(count);
    for (std::uint64_t k = 0; k < count; ++k) {
      const std::size_t length = 2 + draw_index(length_cumulative_, uniform01(rng));
      Loop loop;
      loop.skeleton = draw_skeleton(length, rng);
      loop.holding_times.reserve(length);
      for (VertexId x : loop.skeleton.vertices) {
        loop.holding_times.push_back(std::exponential_distribution<double>(net_.total_rate(x))(rng));
      }
      soup.loops.push_back(std::move(loop));
    }
  }
  soup.trivial_occupation.resize(n);
  for (std::size_t x = 0; x < n; ++x) {
    soup.trivial_occupation[x] = std::gamma_distribution<double>(
        alpha, 1.0 / net_.total_rate(static_cast<VertexId>(x)))(rng);
  }
  return soup;
}

LoopSoupSample sample_loop_soup(const Network& net, const GreenOperator& gop, double alpha,
                                RandomStream& rng, double length_cutoff_eps) {
  return LoopSampler(net, gop, length_cutoff_eps).sample(alpha, rng);
}

OccupationField occupation_field(const LoopSoupSample& sample) {
  OccupationField field{sample.trivial_occupation};
  for (const auto& loop : sample.loops) {
    for (std::size_t i = 0; i < loop.skeleton.vertices.size(); ++i) {
      field.values[loop.skeleton.vertices[i]] += loop.holding_times[i];
    }
  }
  return field;
}

std::vector<EdgeId> traversed_edges(const LoopSoupSample& sample, const Network& net) {
  std::vector<EdgeId> edges;
  for (const auto& loop : sample.loops) {
    const auto& v = loop.skeleton.vertices;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const auto e = net.find_edge(v[i], v[(i + 1) % v.size()]);
      if (!e) throw std::logic_error("loop skeleton uses a non-edge");
      edges.push_back(*e);
    }
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

ClusterPartition loop_clusters(const LoopSoupSample& sample, const Network& net) {
  UnionFind sets(net.vertex_count());
  for (const auto& loop : sample.loops) {
    for (VertexId x : loop.skeleton.vertices) sets.unite(loop.skeleton.vertices.front(), x);
  }
  return make_partition(sets, net, traversed_edges(sample, net));
}

}  // namespace loopfield

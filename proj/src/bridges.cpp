#include "loopfield/bridges.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "loopfield/replicas.hpp"
#include "loopfield/stats.hpp"

namespace loopfield {

BridgeProblem::BridgeProblem(double length, double start_level, double end_level)
    : length_(length), start_(start_level), end_(end_level) {
  if (!(length > 0.0) || !(start_level > 0.0) || !(end_level > 0.0)) {
    throw std::invalid_argument("bridge problem needs T, l1, l2 > 0");
  }
}

double zero_probability_closed_form(double lambda) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be non-negative");
  return std::exp(-2.0 * std::sqrt(lambda));
}

double zero_probability_closed_form(const BridgeProblem& p) {
  return zero_probability_closed_form(p.lambda());
}

double bessel_integral(double lambda, double rel_tol) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be non-negative");
  if (!(rel_tol >= 1e-15)) throw std::invalid_argument("tolerance too small");
  // s = t^2: int_0^inf 2 exp(-lambda/t^2 - t^2) dt, smooth at both ends.
  auto integrand = [lambda](double t) {
    if (t <= 0.0) return 0.0;
    return 2.0 * std::exp(-lambda / (t * t) - t * t);
  };
  using Rule = boost::math::quadrature::gauss_kronrod<double, 61>;
  // Split at the peak sqrt(sqrt(lambda)) so both halves are unimodal.
  const double peak = std::sqrt(std::sqrt(lambda));
  double err_a = 0.0, err_b = 0.0, l1_a = 0.0, l1_b = 0.0;
  const double a = peak > 0.0 ? Rule::integrate(integrand, 0.0, peak, 15, rel_tol * 0.1, &err_a, &l1_a)
                              : 0.0;
  const double b = Rule::integrate(integrand, peak, std::numeric_limits<double>::infinity(), 15,
                                   rel_tol * 0.1, &err_b, &l1_b);
  const double value = a + b;
  // boost reports an estimate of the absolute error of each piece.
  const double achieved = (err_a + err_b) / value;
  if (!(achieved <= rel_tol)) {
    throw QuadratureError("quadrature did not reach the requested tolerance", achieved);
  }
  return value;
}

double zero_probability_quadrature(const BridgeProblem& p, double rel_tol) {
  return bessel_integral(p.lambda(), rel_tol) / std::sqrt(std::numbers::pi);
}

double sample_first_zero(double start_level, double length, RandomStream& rng) {
  if (!(start_level > 0.0) || !(length > 0.0)) throw std::invalid_argument("invalid parameters");
  // l1 / (2 t) is a unit exponential shifted to exceed l1 / (2T).
  const double e = start_level / (2.0 * length) + std::exponential_distribution<double>(1.0)(rng);
  return start_level / (2.0 * e);
}

double sample_last_zero(double end_level, double length, RandomStream& rng) {
  if (!(end_level > 0.0) || !(length > 0.0)) throw std::invalid_argument("invalid parameters");
  const double z = std::normal_distribution<double>()(rng);
  const double u = length * z * z / end_level;
  // t = T u / (1 + u), written to stay in (0, T) for huge u.
  return length / (1.0 + 1.0 / u);
}

double first_zero_density(double t, double start_level, double length) {
  if (!(t > 0.0 && t < length)) return 0.0;
  return start_level / (2.0 * t * t) *
         std::exp(start_level / (2.0 * length) - start_level / (2.0 * t));
}

double last_zero_density(double t, double end_level, double length) {
  if (!(t > 0.0 && t < length)) return 0.0;
  const double rest = length - t;
  return std::sqrt(end_level * length) *
         std::exp(end_level / (2.0 * length) - end_level / (2.0 * rest)) /
         std::sqrt(2.0 * std::numbers::pi * t * rest * rest * rest);
}

ZeroEstimate three_process_zero_mc(const BridgeProblem& p, std::uint64_t replicas,
                                   std::uint64_t seed) {
  RunningStats hits;
  run_replicas(
      replicas, seed,
      [&](std::uint64_t, RandomStream& rng) {
        const double first = sample_first_zero(p.start_level(), p.length(), rng);
        const double last = sample_last_zero(p.end_level(), p.length(), rng);
        return first <= last ? 1.0 : 0.0;
      },
      [&](std::uint64_t, double v) { hits.add(v); });
  return {hits.mean(), hits.standard_error()};
}

}  // namespace loopfield

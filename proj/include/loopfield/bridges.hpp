#pragma once

#include <cstdint>
#include <stdexcept>

#include "loopfield/rng.hpp"

namespace loopfield {

/// Zero problem for the sum of a squared Bessel-0 bridge of length T and two
/// squared Bessel-0 processes started from l1 (at time 0) and l2 (at time T).
class BridgeProblem {
 public:
  BridgeProblem(double length, double start_level, double end_level);

  double length() const { return length_; }
  double start_level() const { return start_; }
  double end_level() const { return end_; }
  /// lambda = l1 l2 / (2T)^2
  double lambda() const { return start_ * end_ / (4.0 * length_ * length_); }

 private:
  double length_;
  double start_;
  double end_;
};

class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double achieved)
      : std::runtime_error(what), achieved_error(achieved) {}
  double achieved_error;
};

/// exp(-2 sqrt(lambda))
double zero_probability_closed_form(const BridgeProblem& p);
double zero_probability_closed_form(double lambda);

/// int_0^inf exp(-lambda/s - s) ds / sqrt(s), evaluated after s = t^2.
/// Throws QuadratureError if the estimated relative error exceeds rel_tol.
double bessel_integral(double lambda, double rel_tol = 1e-12);

/// bessel_integral(lambda) / sqrt(pi).
double zero_probability_quadrature(const BridgeProblem& p, double rel_tol = 1e-12);

/// First zero of the process started from l1, conditioned to vanish before
/// T: density (l1 / 2t^2) exp(l1/2T - l1/2t) on (0, T). Exact inversion.
double sample_first_zero(double start_level, double length, RandomStream& rng);

/// Last zero of the bridge part ending at l2: density
/// sqrt(l2 T) exp(l2/2T - l2/(2(T-t))) / sqrt(2 pi t (T-t)^3) on (0, T).
/// With u = t/(T-t) this is u ~ Gamma(1/2, rate l2/(2T)), sampled as
/// u = T Z^2 / l2.
double sample_last_zero(double end_level, double length, RandomStream& rng);

double first_zero_density(double t, double start_level, double length);
double last_zero_density(double t, double end_level, double length);

struct ZeroEstimate {
  double probability = 0.0;
  double standard_error = 0.0;
};

/// Fraction of replicas with first zero <= last zero.
ZeroEstimate three_process_zero_mc(const BridgeProblem& p, std::uint64_t replicas,
                                   std::uint64_t seed);

}  // namespace loopfield

#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace loopfield {

/// Pass thresholds shared by every statistical check.
struct Thresholds {
  double max_abs_z = 3.9;
  double min_ks_p = 1e-3;
};

/// Welford accumulator.
class RunningStats {
 public:
  void add(double x) {
    ++count_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(count_);
    m2_ += delta * (x - mean_);
  }
  std::uint64_t count() const { return count_; }
  double mean() const { return mean_; }
  double variance() const { return count_ > 1 ? m2_ / static_cast<double>(count_ - 1) : 0.0; }
  double standard_error() const {
    return count_ > 0 ? std::sqrt(variance() / static_cast<double>(count_)) : 0.0;
  }

 private:
  std::uint64_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

/// Standard error of a frequency estimate p over n trials.
double binomial_standard_error(double p, std::uint64_t n);

/// (estimate - target) / stderr; 0 when both the difference and stderr vanish.
double z_score(double estimate, double target, double standard_error);
double two_sample_z(double mean_a, double se_a, double mean_b, double se_b);

double normal_cdf(double x);

/// Kolmogorov-Smirnov statistic of `samples` against a continuous CDF.
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);
/// Asymptotic p-value of the one-sample KS statistic (Stephens' small-sample
/// correction of the Kolmogorov distribution).
double ks_p_value(double statistic, std::size_t n);
double ks_test(std::vector<double> samples, const std::function<double(double)>& cdf);

/// Upper tail of the chi-square distribution.
double chi_square_p_value(double statistic, double dof);

/// Chi-square equidistribution test of values in [0, 1) on `bins` bins.
double uniformity_p_value(std::span<const double> values, int bins);

}  // namespace loopfield

#include "loopfield/stats.hpp"

#include <algorithm>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

namespace loopfield {

double binomial_standard_error(double p, std::uint64_t n) {
  if (n == 0) return 0.0;
  return std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(n));
}

double z_score(double estimate, double target, double standard_error) {
  const double diff = estimate - target;
  if (standard_error > 0.0) return diff / standard_error;
  if (std::abs(diff) <= 1e-12 * std::max(1.0, std::abs(target))) return 0.0;
  return diff > 0 ? INFINITY : -INFINITY;
}

double two_sample_z(double mean_a, double se_a, double mean_b, double se_b) {
  return z_score(mean_a, mean_b, std::sqrt(se_a * se_a + se_b * se_b));
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw std::invalid_argument("KS test needs samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  return d;
}

double ks_p_value(double statistic, std::size_t n) {
  const double sn = std::sqrt(static_cast<double>(n));
  const double lambda = (sn + 0.12 + 0.11 / sn) * statistic;
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = sign * std::exp(-2.0 * k * k * lambda * lambda);
    sum += term;
    if (std::abs(term) < 1e-16) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

double ks_test(std::vector<double> samples, const std::function<double(double)>& cdf) {
  const std::size_t n = samples.size();
  return ks_p_value(ks_statistic(std::move(samples), cdf), n);
}

double chi_square_p_value(double statistic, double dof) {
  if (statistic <= 0.0) return 1.0;
  return boost::math::gamma_q(0.5 * dof, 0.5 * statistic);
}

double uniformity_p_value(std::span<const double> values, int bins) {
  if (bins < 2 || values.empty()) throw std::invalid_argument("uniformity test needs data");
  std::vector<double> counts(static_cast<std::size_t>(bins), 0.0);
  for (double v : values) {
    const int b = std::clamp(static_cast<int>(v * bins), 0, bins - 1);
    counts[static_cast<std::size_t>(b)] += 1.0;
  }
  const double expected = static_cast<double>(values.size()) / bins;
  double stat = 0.0;
  for (double c : counts) stat += (c - expected) * (c - expected) / expected;
  return chi_square_p_value(stat, bins - 1);
}

}  // namespace loopfield

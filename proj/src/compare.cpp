#include "srcdelay/compare.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace srcdelay {

std::vector<double> empirical_cdf(const std::vector<std::int64_t>& samples, std::int64_t u_max) {
  if (u_max < 0) throw std::invalid_argument("u_max >= 0 required");
  std::vector<double> counts(static_cast<std::size_t>(u_max) + 1, 0.0);
  for (auto s : samples) {
    if (s < 0) throw std::invalid_argument("negative delay sample");
    if (s <= u_max) counts[static_cast<std::size_t>(s)] += 1.0;
  }
  if (samples.empty()) return counts;
  const double n = static_cast<double>(samples.size());
  double running = 0.0;
  for (auto& c : counts) {
    running += c;
    c = running / n;
  }
  return counts;
}

double ks_distance(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_distance needs non-empty CDFs");
  const std::size_t len = std::max(a.size(), b.size());
  double worst = 0.0;
  for (std::size_t u = 0; u < len; ++u) {
    const double fa = a[std::min(u, a.size() - 1)];
    const double fb = b[std::min(u, b.size() - 1)];
    worst = std::max(worst, std::abs(fa - fb));
  }
  return worst;
}

SampleMoments sample_moments(const std::vector<std::int64_t>& samples) {
  SampleMoments m;
  m.count = samples.size();
  if (samples.empty()) return m;
  const double n = static_cast<double>(samples.size());
  double sum = 0.0;
  for (auto s : samples) sum += static_cast<double>(s);
  m.mean = sum / n;
  double m2 = 0.0;
  double m4 = 0.0;
  for (auto s : samples) {
    const double d = static_cast<double>(s) - m.mean;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  if (samples.size() > 1) {
    m.variance = m2 / (n - 1.0);
    m.mean_se = std::sqrt(m.variance / n);
    const double pop2 = m2 / n;
    m.variance_se = std::sqrt(std::max(0.0, m4 / n - pop2 * pop2) / n);
  }
  return m;
}

Comparison compare(const PhaseTypeRep& rep, const std::vector<std::int64_t>& samples, double threshold) {
  if (samples.empty()) throw std::invalid_argument("no samples");
  Comparison c;
  c.threshold = threshold;
  const std::int64_t largest = *std::max_element(samples.begin(), samples.end());
  c.support_max = std::max(largest, adaptive_horizon(rep));
  const auto table = tabulate(rep, c.support_max);
  c.ks_distance = ks_distance(table.cdf, empirical_cdf(samples, c.support_max));
  c.passed = c.ks_distance <= threshold;
  c.analytic_mean = mean(rep);
  c.analytic_variance = variance(rep);
  c.empirical = sample_moments(samples);
  c.mean_delta = c.empirical.mean - c.analytic_mean;
  c.variance_delta = c.empirical.variance - c.analytic_variance;
  return c;
}

}  // namespace srcdelay

#ifndef SRCDELAY_COMPARE_HPP
#define SRCDELAY_COMPARE_HPP

#include <cstdint>
#include <vector>

#include "srcdelay/simulator.hpp"
#include "srcdelay/source_delay.hpp"

namespace srcdelay {

/// F(u) = #{samples <= u} / N for u = 0..u_max.
std::vector<double> empirical_cdf(const std::vector<std::int64_t>& samples, std::int64_t u_max);

/// sup_u |a(u) - b(u)| over the longer support; the shorter CDF is held at
/// its last value past its end.
double ks_distance(const std::vector<double>& a, const std::vector<double>& b);

struct SampleMoments {
  std::size_t count = 0;
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double mean_se = 0.0;
  double variance_se = 0.0;
};

SampleMoments sample_moments(const std::vector<std::int64_t>& samples);

struct Comparison {
  double ks_distance = 0.0;
  double threshold = 0.02;
  bool passed = false;
  std::int64_t support_max = 0;
  double analytic_mean = 0.0;
  double analytic_variance = 0.0;
  SampleMoments empirical;
  double mean_delta = 0.0;      // empirical - analytic
  double variance_delta = 0.0;  // empirical - analytic
};

/// Analytic law of `rep` against the empirical samples, on 0..max(largest
/// sample, adaptive horizon).
Comparison compare(const PhaseTypeRep& rep, const std::vector<std::int64_t>& samples, double threshold = 0.02);

}  // namespace srcdelay

#endif  // SRCDELAY_COMPARE_HPP

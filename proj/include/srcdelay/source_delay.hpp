#ifndef SRCDELAY_SOURCE_DELAY_HPP
#define SRCDELAY_SOURCE_DELAY_HPP

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "srcdelay/steady_state.hpp"

namespace srcdelay {

/// Discrete phase-type representation of the source delay U:
/// Pr{U = u} = pi_minus T^{u-1} c_plus, u >= 1.
struct PhaseTypeRep {
  RowVector pi_minus;  // conditional post-insertion distribution without (0,0)
  Matrix T;
  Vector c_plus;
};

/// Builds (pi_minus, T, c_plus) for cfg. Requires lambda > 0.
PhaseTypeRep phase_type(const NetworkConfig& cfg);

/// Same, from an already computed conditional distribution.
PhaseTypeRep phase_type(const NetworkConfig& cfg, const StateDistribution& conditional);

double pmf(const PhaseTypeRep& rep, std::int64_t u);
double cdf(const PhaseTypeRep& rep, std::int64_t u);

/// Tail mass pi_minus T^u 1.
double tail(const PhaseTypeRep& rep, std::int64_t u);

/// pi_minus (I - T)^{-2} c_plus.
double mean(const PhaseTypeRep& rep);

/// pi_minus (I + T)(I - T)^{-3} c_plus - mean^2.
double variance(const PhaseTypeRep& rep);

/// Smallest u >= 0 with cdf(u) >= p, for 0 <= p < 1.
std::int64_t quantile(const PhaseTypeRep& rep, double p);

inline constexpr std::int64_t kHorizonStart = 1024;
inline constexpr std::int64_t kHorizonCap = std::int64_t{1} << 26;

/// Smallest horizon in 1024 * 2^k with tail mass below tail_tol. Throws
/// std::runtime_error past 2^26 slots.
std::int64_t adaptive_horizon(const PhaseTypeRep& rep, double tail_tol = 1e-12);

/// pmf and cdf on 0..u_max in one pass; pmf[0] = 0, cdf[0] = 0.
struct DelayTable {
  std::vector<double> pmf;
  std::vector<double> cdf;
};

DelayTable tabulate(const PhaseTypeRep& rep, std::int64_t u_max);

struct SourceDelayStats {
  double mean = 0.0;
  double variance = 0.0;
  double std_dev = 0.0;
  std::int64_t p50 = 0;
  std::int64_t p90 = 0;
  std::int64_t p99 = 0;
};

SourceDelayStats summarize(const PhaseTypeRep& rep);

/// CSV with header "u,cdf" over u = 0..u_max.
void write_cdf_csv(std::ostream& out, const DelayTable& table);

}  // namespace srcdelay

#endif  // SRCDELAY_SOURCE_DELAY_HPP

#include "srcdelay/source_delay.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>
#include <string>

namespace srcdelay {

PhaseTypeRep phase_type(const NetworkConfig& cfg) {
  if (!(cfg.lambda > 0.0)) {
    validate_config(cfg);
    throw std::invalid_argument("lambda > 0 required for conditional distribution");
  }
  return phase_type(cfg, conditional_distribution(cfg, solve_pi_omega(cfg)));
}

PhaseTypeRep phase_type(const NetworkConfig& cfg, const StateDistribution& conditional) {
  if (conditional.kind != DistributionKind::conditional) {
    throw std::invalid_argument("phase_type needs the post-insertion (conditional) distribution");
  }
  const auto parts = absorbing_parts(cfg, contact_probabilities(cfg));
  const Eigen::Index size = parts.T.rows();
  if (conditional.values.size() != size + 1) {
    throw std::invalid_argument("distribution size does not match config");
  }
  PhaseTypeRep rep;
  rep.pi_minus = conditional.values.tail(size);
  rep.T = parts.T;
  rep.c_plus = parts.c_plus;
  return rep;
}

double pmf(const PhaseTypeRep& rep, std::int64_t u) {
  if (u < 1) throw std::invalid_argument("pmf needs u >= 1");
  RowVector v = rep.pi_minus;
  for (std::int64_t k = 1; k < u; ++k) v = v * rep.T;
  return v.dot(rep.c_plus.transpose());
}

double tail(const PhaseTypeRep& rep, std::int64_t u) {
  if (u < 0) throw std::invalid_argument("tail needs u >= 0");
  RowVector v = rep.pi_minus;
  for (std::int64_t k = 0; k < u; ++k) v = v * rep.T;
  return v.sum();
}

double cdf(const PhaseTypeRep& rep, std::int64_t u) {
  if (u < 0) throw std::invalid_argument("cdf needs u >= 0");
  if (u == 0) return 0.0;
  return 1.0 - tail(rep, u);
}

namespace {

// I - T. When every row of [T c] sums to one the diagonal is rebuilt from the
// exit and off-diagonal mass instead of 1 - T(i,i), which cancels badly when
// T(i,i) is close to 1.
Matrix identity_minus(const Matrix& T, const Vector& c_plus) {
  Matrix out = -T;
  const Vector rows = T.rowwise().sum() + c_plus;
  const bool conserving = c_plus.size() == T.rows() && (rows.array() - 1.0).abs().maxCoeff() <= 1e-12;
  for (Eigen::Index i = 0; i < T.rows(); ++i) {
    out(i, i) = conserving ? c_plus(i) + (T.row(i).sum() - T(i, i)) : 1.0 - T(i, i);
  }
  return out;
}

// Factorization of (I - T) reused for every moment.
class ResolventSolver {
 public:
  ResolventSolver(const Matrix& T, const Vector& c_plus) : IminusT_(identity_minus(T, c_plus)), lu_(IminusT_) {}

  Vector solve(const Vector& b) const {
    Vector x = lu_.solve(b);
    const double residual = (IminusT_ * x - b).lpNorm<Eigen::Infinity>();
    const double scale = std::max(1.0, x.lpNorm<Eigen::Infinity>());
    if (!x.allFinite() || residual > 1e-9 * scale) {
      throw std::runtime_error("I - T is near-singular (residual " + std::to_string(residual) + ")");
    }
    return x;
  }

 private:
  Matrix IminusT_;
  Eigen::PartialPivLU<Matrix> lu_;
};

}  // namespace

double mean(const PhaseTypeRep& rep) {
  const ResolventSolver solver(rep.T, rep.c_plus);
  const Vector once = solver.solve(rep.c_plus);
  return rep.pi_minus.dot(solver.solve(once).transpose());
}

double variance(const PhaseTypeRep& rep) {
  const ResolventSolver solver(rep.T, rep.c_plus);
  const Vector x1 = solver.solve(rep.c_plus);
  const Vector x2 = solver.solve(x1);
  const Vector x3 = solver.solve(x2);
  const double m = rep.pi_minus.dot(x2.transpose());
  const Vector plus = x3 + rep.T * x3;
  const double second = rep.pi_minus.dot(plus.transpose());
  const double v = second - m * m;
  if (v < 0.0) {
    if (v < -1e-9 * std::max(1.0, m * m)) {
      throw std::runtime_error("negative variance " + std::to_string(v));
    }
    return 0.0;
  }
  return v;
}

std::int64_t quantile(const PhaseTypeRep& rep, double p) {
  if (!(p >= 0.0 && p < 1.0)) throw std::invalid_argument("quantile needs 0 <= p < 1");
  if (cdf(rep, 0) >= p) return 0;
  std::int64_t lo = 0;  // cdf(lo) < p
  std::int64_t hi = 1;
  while (cdf(rep, hi) < p) {
    lo = hi;
    hi *= 2;
    if (hi > kHorizonCap) throw std::runtime_error("quantile beyond the horizon cap");
  }
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (cdf(rep, mid) >= p) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

std::int64_t adaptive_horizon(const PhaseTypeRep& rep, double tail_tol) {
  RowVector v = rep.pi_minus;
  std::int64_t u = 0;
  for (std::int64_t horizon = kHorizonStart; horizon <= kHorizonCap; horizon *= 2) {
    for (; u < horizon; ++u) v = v * rep.T;
    if (v.sum() < tail_tol) return horizon;
  }
  throw std::runtime_error("tail mass still above " + std::to_string(tail_tol) + " at 2^26 slots");
}

DelayTable tabulate(const PhaseTypeRep& rep, std::int64_t u_max) {
  if (u_max < 0) throw std::invalid_argument("tabulate needs u_max >= 0");
  DelayTable table;
  table.pmf.assign(static_cast<std::size_t>(u_max) + 1, 0.0);
  table.cdf.assign(static_cast<std::size_t>(u_max) + 1, 0.0);
  RowVector v = rep.pi_minus;  // pi_minus T^{u-1}
  for (std::int64_t u = 1; u <= u_max; ++u) {
    const auto i = static_cast<std::size_t>(u);
    table.pmf[i] = v.dot(rep.c_plus.transpose());
    v = v * rep.T;
    table.cdf[i] = 1.0 - v.sum();
  }
  return table;
}

SourceDelayStats summarize(const PhaseTypeRep& rep) {
  SourceDelayStats s;
  s.mean = mean(rep);
  s.variance = variance(rep);
  s.std_dev = std::sqrt(s.variance);
  s.p50 = quantile(rep, 0.5);
  s.p90 = quantile(rep, 0.9);
  s.p99 = quantile(rep, 0.99);
  return s;
}

void write_cdf_csv(std::ostream& out, const DelayTable& table) {
  out << "u,cdf\n" << std::setprecision(17);
  for (std::size_t u = 0; u < table.cdf.size(); ++u) out << u << ',' << table.cdf[u] << '\n';
}

}  // namespace srcdelay

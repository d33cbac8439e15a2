#ifndef SRCDELAY_STEADY_STATE_HPP
#define SRCDELAY_STEADY_STATE_HPP

#include <iosfwd>
#include <stdexcept>

#include "srcdelay/qbd.hpp"

namespace srcdelay {

enum class DistributionKind { stationary, conditional };

/// Probability row vector over the 1 + M f local-queue states, ordered by
/// StateIndexing.
struct StateDistribution {
  RowVector values;
  DistributionKind kind = DistributionKind::stationary;
};

/// Raised when a linear system that should be well posed is not.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Clips entries in [-1e-12, 0) to zero and renormalizes. Anything more
/// negative, or a vector with no mass, throws SolverError.
RowVector clean_distribution(RowVector values);

/// Stationary local-queue distribution by the level-structured solve:
/// explicit M = 1 and M = 2 systems, matrix-geometric levels for M >= 3.
StateDistribution solve_pi_omega(const NetworkConfig& cfg);

/// Stationary distribution of the full P0 matrix by Gaussian elimination
/// with partial pivoting, one balance equation replaced by sum(pi) = 1.
/// Independent of solve_pi_omega; used as its oracle.
StateDistribution solve_pi_omega_dense(const NetworkConfig& cfg);

/// ||pi P0 - pi||_inf for the config's P0.
double fixed_point_residual(const NetworkConfig& cfg, const StateDistribution& pi);

/// lambda * pi P1 1: long-run probability per slot that a packet is
/// generated and accepted into the local queue.
double acceptance_probability(const NetworkConfig& cfg, const StateDistribution& pi);

/// Queue state seen right after a packet insertion:
/// pi P2 / (lambda pi P1 1). Requires lambda > 0.
StateDistribution conditional_distribution(const NetworkConfig& cfg, const StateDistribution& pi);

/// CSV with columns state,level,phase,probability.
void write_distribution_csv(std::ostream& out, const StateDistribution& dist, const StateIndexing& indexing);

}  // namespace srcdelay

#endif  // SRCDELAY_STEADY_STATE_HPP

#ifndef SRCDELAY_QBD_HPP
#define SRCDELAY_QBD_HPP

#include <Eigen/Dense>

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>

#include "srcdelay/model_params.hpp"

namespace srcdelay {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

/// Row-sum / stochasticity tolerance used throughout the kernel.
inline constexpr double kStochasticTol = 1e-12;

/// Which transition structure a set of QBD blocks instantiates.
///   P0: the local-queue chain itself (row-stochastic).
///   P1: service-only moves that land in a non-full state.
///   P2: moves that land in a state right after a packet was inserted.
///   P3: the absorbing chain seen by a tagged packet.
enum class Chain { P0, P1, P2, P3 };

/// Parses "P0".."P3" (case-insensitive); throws std::invalid_argument.
Chain chain_from_string(std::string_view name);
std::string to_string(Chain chain);

struct QueueState {
  int level = 0;  // packets in the local queue
  int phase = 0;  // dispatches already made for the head-of-line packet

  bool operator==(const QueueState&) const = default;
};

/// Bijection between (level, phase) and the linear state index:
/// (0,0) -> 0, (l,j) -> 1 + (l-1)*f + j.
class StateIndexing {
 public:
  StateIndexing(int M, int f);

  std::size_t size() const { return 1 + static_cast<std::size_t>(M_) * f_; }
  std::size_t index(QueueState s) const;
  QueueState state(std::size_t index) const;
  /// "(l,j)" label used in CSV headers.
  std::string label(std::size_t index) const;

  int M() const { return M_; }
  int f() const { return f_; }

 private:
  int M_;
  int f_;
};

/// Column c, unit row [1 0 ... 0], and the phase-advance matrix Q of the
/// head-of-line packet.
struct ElementaryParts {
  Vector c;           // [p0 ... p0, p0 + p1]^T
  RowVector unit_row;  // [1, 0, ..., 0]
  Matrix Q;           // p2 on the diagonal, p1 on the superdiagonal
};

ElementaryParts elementary_parts(const ContactProbabilities& probs, int f);

struct QbdBlocks {
  Chain chain = Chain::P0;
  Matrix B0;  // 1 x f : (0,0) -> level 1
  Matrix B1;  // 1 x 1 : (0,0) -> (0,0)
  Matrix B2;  // f x 1 : level 1 -> (0,0)
  Matrix A0;  // f x f : level l -> l+1
  Matrix A1;  // f x f : level l -> l (l < M)
  Matrix A2;  // f x f : level l -> l-1 (l >= 2)
  Matrix AM;  // f x f : level M -> M
};

QbdBlocks build_blocks(Chain chain, const NetworkConfig& cfg, const ContactProbabilities& probs);

/// Block-tridiagonal matrix of size (1 + M f)^2. M = 1 gives [[B1, B0], [B2, AM]];
/// otherwise level 1 carries B2/A1/A0, interior levels A2/A1/A0, level M A2/AM.
Matrix assemble(const QbdBlocks& blocks, int M, int f);

/// Transient block T and absorption column c+ of the tagged-packet chain.
struct AbsorbingParts {
  Matrix T;
  Vector c_plus;
};

AbsorbingParts absorbing_parts(const NetworkConfig& cfg, const ContactProbabilities& probs);

/// Bounds on the spectral radius of a nonnegative square matrix from
/// Collatz-Wielandt ratios along a power iteration.
struct SpectralEstimate {
  double lower = 0.0;
  double upper = 0.0;
  int iterations = 0;

  double value() const { return 0.5 * (lower + upper); }
};

SpectralEstimate spectral_radius(const Matrix& nonnegative, double tol = 1e-9,
                                 int max_iterations = 200000);

/// Writes a square state-space matrix as CSV: header row of state labels,
/// then one row per state, values with 17 significant digits.
void write_matrix_csv(std::ostream& out, const Matrix& matrix, const StateIndexing& indexing);

}  // namespace srcdelay

#endif  // SRCDELAY_QBD_HPP

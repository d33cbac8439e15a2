#include "srcdelay/qbd.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace srcdelay {

Chain chain_from_string(std::string_view name) {
  std::string upper(name);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::toupper(ch)); });
  if (upper == "P0") return Chain::P0;
  if (upper == "P1") return Chain::P1;
  if (upper == "P2") return Chain::P2;
  if (upper == "P3") return Chain::P3;
  throw std::invalid_argument("unknown chain tag: " + std::string(name));
}

std::string to_string(Chain chain) {
  switch (chain) {
    case Chain::P0: return "P0";
    case Chain::P1: return "P1";
    case Chain::P2: return "P2";
    case Chain::P3: return "P3";
  }
  return "?";
}

StateIndexing::StateIndexing(int M, int f) : M_(M), f_(f) {
  if (M < 1 || f < 1) throw std::invalid_argument("StateIndexing needs M >= 1 and f >= 1");
}

std::size_t StateIndexing::index(QueueState s) const {
  if (s.level == 0) {
    if (s.phase != 0) throw std::out_of_range("empty queue must have phase 0");
    return 0;
  }
  if (s.level < 0 || s.level > M_ || s.phase < 0 || s.phase >= f_) {
    throw std::out_of_range("queue state outside the state space");
  }
  return 1 + static_cast<std::size_t>(s.level - 1) * f_ + s.phase;
}

QueueState StateIndexing::state(std::size_t index) const {
  if (index >= size()) throw std::out_of_range("state index outside the state space");
  if (index == 0) return {0, 0};
  const auto k = index - 1;
  return {static_cast<int>(k / f_) + 1, static_cast<int>(k % f_)};
}

std::string StateIndexing::label(std::size_t index) const {
  const auto s = state(index);
  return "(" + std::to_string(s.level) + "," + std::to_string(s.phase) + ")";
}

ElementaryParts elementary_parts(const ContactProbabilities& probs, int f) {
  if (f < 1) throw std::invalid_argument("f >= 1 required");
  ElementaryParts parts;
  parts.c = Vector::Constant(f, probs.p0);
  parts.c(f - 1) += probs.p1;
  parts.unit_row = RowVector::Zero(f);
  parts.unit_row(0) = 1.0;
  parts.Q = Matrix::Zero(f, f);
  for (int j = 0; j < f; ++j) {
    parts.Q(j, j) = probs.p2;
    if (j + 1 < f) parts.Q(j, j + 1) = probs.p1;
  }
  return parts;
}

namespace {

// Coefficient of the form `constant + slope * lambda`.
struct Coef {
  double constant = 0.0;
  double slope = 0.0;

  double at(double lambda) const { return constant + slope * lambda; }
};

constexpr Coef kZero{0.0, 0.0};
constexpr Coef kOne{1.0, 0.0};
constexpr Coef kLam{0.0, 1.0};
constexpr Coef kOneMinusLam{1.0, -1.0};

// Every f x f block is q * Q + cr * (c . unit_row); B0 is b0 * unit_row,
// B1 is b1, and B2 is b2 * c.
struct PhaseBlock {
  Coef q;
  Coef cr;
};

struct ChainRecipe {
  Coef b0;
  Coef b1;
  Coef b2;
  PhaseBlock a0;
  PhaseBlock a1;
  PhaseBlock a2;
  PhaseBlock am;
};

// The M = 1 settings of every chain coincide with the M >= 2 ones for the
// blocks that appear in the 2 x 2 layout, so one row per chain suffices.
constexpr std::array<ChainRecipe, 4> kRecipes{{
    // P0: arrivals with probability lambda, service before arrival.
    {kLam, kOneMinusLam, kOneMinusLam,
     {kLam, kZero}, {kOneMinusLam, kLam}, {kZero, kOneMinusLam}, {kOne, kLam}},
    // P1: service-only transitions into non-full states.
    {kZero, kOne, kOne,
     {kZero, kZero}, {kOne, kZero}, {kZero, kOne}, {kZero, kZero}},
    // P2: transitions that coincide with an accepted arrival.
    {kLam, kZero, kZero,
     {kLam, kZero}, {kZero, kLam}, {kZero, kZero}, {kZero, kLam}},
    // P3: the tagged packet's absorbing chain (later arrivals ignored).
    {kZero, kOne, kOne,
     {kZero, kZero}, {kOne, kZero}, {kZero, kOne}, {kOne, kZero}},
}};

Matrix phase_block(const PhaseBlock& recipe, const ElementaryParts& parts, double lambda) {
  const Matrix cr = parts.c * parts.unit_row;
  return recipe.q.at(lambda) * parts.Q + recipe.cr.at(lambda) * cr;
}

}  // namespace

QbdBlocks build_blocks(Chain chain, const NetworkConfig& cfg, const ContactProbabilities& probs) {
  validate_config(cfg);
  const auto& recipe = kRecipes.at(static_cast<std::size_t>(chain));
  const auto parts = elementary_parts(probs, cfg.f);
  const double lambda = cfg.lambda;

  QbdBlocks b;
  b.chain = chain;
  b.B0 = recipe.b0.at(lambda) * parts.unit_row;
  b.B1 = Matrix::Constant(1, 1, recipe.b1.at(lambda));
  b.B2 = recipe.b2.at(lambda) * parts.c;
  b.A0 = phase_block(recipe.a0, parts, lambda);
  b.A1 = phase_block(recipe.a1, parts, lambda);
  b.A2 = phase_block(recipe.a2, parts, lambda);
  b.AM = phase_block(recipe.am, parts, lambda);
  return b;
}

Matrix assemble(const QbdBlocks& b, int M, int f) {
  if (M < 1 || f < 1) throw std::invalid_argument("assemble needs M >= 1 and f >= 1");
  auto check = [](const Matrix& x, Eigen::Index rows, Eigen::Index cols, const char* name) {
    if (x.rows() != rows || x.cols() != cols) {
      throw std::invalid_argument(std::string("block ") + name + " has dimension " +
                                  std::to_string(x.rows()) + "x" + std::to_string(x.cols()) +
                                  ", expected " + std::to_string(rows) + "x" +
                                  std::to_string(cols));
    }
  };
  check(b.B0, 1, f, "B0");
  check(b.B1, 1, 1, "B1");
  check(b.B2, f, 1, "B2");
  check(b.A0, f, f, "A0");
  check(b.A1, f, f, "A1");
  check(b.A2, f, f, "A2");
  check(b.AM, f, f, "AM");

  const Eigen::Index size = 1 + static_cast<Eigen::Index>(M) * f;
  Matrix P = Matrix::Zero(size, size);
  P(0, 0) = b.B1(0, 0);
  P.block(0, 1, 1, f) = b.B0;
  P.block(1, 0, f, 1) = b.B2;
  for (int level = 1; level <= M; ++level) {
    const Eigen::Index row = 1 + static_cast<Eigen::Index>(level - 1) * f;
    P.block(row, row, f, f) = (level == M) ? b.AM : b.A1;
    if (level < M) P.block(row, row + f, f, f) = b.A0;
    if (level >= 2) P.block(row, row - f, f, f) = b.A2;
  }
  return P;
}

AbsorbingParts absorbing_parts(const NetworkConfig& cfg, const ContactProbabilities& probs) {
  validate_config(cfg);
  const int f = cfg.f;
  const int M = cfg.M;
  const auto parts = elementary_parts(probs, f);
  const Matrix cr = parts.c * parts.unit_row;
  const Eigen::Index size = static_cast<Eigen::Index>(M) * f;

  AbsorbingParts out;
  out.T = Matrix::Zero(size, size);
  out.c_plus = Vector::Zero(size);
  out.c_plus.head(f) = parts.c;
  for (int level = 0; level < M; ++level) {
    const Eigen::Index row = static_cast<Eigen::Index>(level) * f;
    out.T.block(row, row, f, f) = parts.Q;
    if (level >= 1) out.T.block(row, row - f, f, f) = cr;
  }
  return out;
}

SpectralEstimate spectral_radius(const Matrix& A, double tol, int max_iterations) {
  if (A.rows() != A.cols()) throw std::invalid_argument("spectral_radius needs a square matrix");
  if ((A.array() < 0.0).any()) throw std::invalid_argument("spectral_radius needs a nonnegative matrix");
  SpectralEstimate est;
  if (A.rows() == 0) return est;

  Vector x = Vector::Ones(A.rows());
  for (int it = 1; it <= max_iterations; ++it) {
    Vector y = A * x;
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      if (x(i) > 0.0) {
        const double ratio = y(i) / x(i);
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
      } else if (y(i) > 0.0) {
        hi = std::numeric_limits<double>::infinity();
      }
    }
    const double norm = y.lpNorm<Eigen::Infinity>();
    est.iterations = it;
    if (norm == 0.0) {  // nilpotent
      est.lower = 0.0;
      est.upper = 0.0;
      return est;
    }
    est.lower = std::isfinite(lo) ? lo : 0.0;
    est.upper = hi;
    if (est.upper - est.lower <= tol * std::max(1.0, est.upper)) return est;
    x = y / norm;
  }
  return est;
}

void write_matrix_csv(std::ostream& out, const Matrix& matrix, const StateIndexing& indexing) {
  const auto size = static_cast<Eigen::Index>(indexing.size());
  if (matrix.rows() != size || matrix.cols() != size) {
    throw std::invalid_argument("matrix does not match the state indexing");
  }
  out << "state";
  for (Eigen::Index j = 0; j < size; ++j) out << ",\"" << indexing.label(j) << '"';
  out << '\n' << std::setprecision(17);
  for (Eigen::Index i = 0; i < size; ++i) {
    out << '"' << indexing.label(i) << '"';
    for (Eigen::Index j = 0; j < size; ++j) out << ',' << matrix(i, j);
    out << '\n';
  }
}

}  // namespace srcdelay

#include "srcdelay/steady_state.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace srcdelay {

namespace {

constexpr double kClipTol = 1e-12;

// Returns X = A (I - B)^{-1} via a linear solve on the transposed system.
Matrix right_divide_by_identity_minus(const Matrix& A, const Matrix& B, const char* what) {
  const Matrix IminusB = Matrix::Identity(B.rows(), B.cols()) - B;
  Eigen::PartialPivLU<Matrix> lu(IminusB.transpose());
  const Matrix X = lu.solve(A.transpose()).transpose();
  const double residual = (X * IminusB - A).lpNorm<Eigen::Infinity>();
  if (!X.allFinite() || residual > 1e-9 * std::max(1.0, A.lpNorm<Eigen::Infinity>())) {
    throw SolverError(std::string("ill-conditioned solve for ") + what +
                      " (residual " + std::to_string(residual) + ")");
  }
  return X;
}

// Solves x (I - K) = 0 with x . weights = 1, the (0,0) balance equation
// being the one dropped.
RowVector solve_boundary(const Matrix& K, const Vector& weights) {
  const Eigen::Index n = K.rows();
  Matrix A = (Matrix::Identity(n, n) - K).transpose();
  A.row(0) = weights.transpose();
  Vector rhs = Vector::Zero(n);
  rhs(0) = 1.0;
  Eigen::PartialPivLU<Matrix> lu(A);
  Vector x = lu.solve(rhs);
  const double residual = (A * x - rhs).lpNorm<Eigen::Infinity>();
  if (!x.allFinite() || residual > 1e-9) {
    throw SolverError("singular boundary system (residual " + std::to_string(residual) + ")");
  }
  return x.transpose();
}

Matrix boundary_matrix(const QbdBlocks& b, const Matrix& level_one_block) {
  const Eigen::Index f = b.A1.rows();
  Matrix K(1 + f, 1 + f);
  K(0, 0) = b.B1(0, 0);
  K.block(0, 1, 1, f) = b.B0;
  K.block(1, 0, f, 1) = b.B2;
  K.block(1, 1, f, f) = level_one_block;
  return K;
}

// Gaussian elimination with partial pivoting on a dense copy.
Vector gauss_solve(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    }
    if (std::abs(a[pivot][col]) < 1e-300) throw SolverError("singular system in dense stationary solve");
    std::swap(a[pivot], a[col]);
    std::swap(b[pivot], b[col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double factor = a[r][col] / a[col][col];
      if (factor == 0.0) continue;
      for (std::size_t k = col; k < n; ++k) a[r][k] -= factor * a[col][k];
      b[r] -= factor * b[col];
    }
  }
  Vector x(static_cast<Eigen::Index>(n));
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= a[i][k] * x(static_cast<Eigen::Index>(k));
    x(static_cast<Eigen::Index>(i)) = s / a[i][i];
  }
  return x;
}

}  // namespace

RowVector clean_distribution(RowVector values) {
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values(i))) throw SolverError("non-finite probability");
    if (values(i) < 0.0) {
      if (values(i) < -kClipTol) {
        throw SolverError("negative probability " + std::to_string(values(i)) + " at state index " +
                          std::to_string(i));
      }
      values(i) = 0.0;
    }
  }
  const double total = values.sum();
  if (!(total > 0.0)) throw SolverError("distribution has no mass");
  return values / total;
}

StateDistribution solve_pi_omega(const NetworkConfig& cfg) {
  const auto probs = contact_probabilities(cfg);
  const auto b = build_blocks(Chain::P0, cfg, probs);
  const int M = cfg.M;
  const int f = cfg.f;
  const Eigen::Index size = 1 + static_cast<Eigen::Index>(M) * f;

  RowVector pi = RowVector::Zero(size);
  const Matrix RM = right_divide_by_identity_minus(b.A0, b.AM, "R_M");

  if (M == 1) {
    // pi_1 = pi_0 B0 (I - AM)^{-1}; pi_0 fixed by normalization.
    const RowVector ratio = right_divide_by_identity_minus(b.B0, b.AM, "level 1");
    pi(0) = 1.0;
    pi.segment(1, f) = ratio;
  } else if (M == 2) {
    // pi_2 = pi_1 R_M eliminates level 2 from the four balance equations.
    const Matrix K = boundary_matrix(b, b.A1 + RM * b.A2);
    Vector w(1 + f);
    w(0) = 1.0;
    w.tail(f) = (Matrix::Identity(f, f) + RM) * Vector::Ones(f);
    const RowVector head = solve_boundary(K, w);
    pi.segment(0, 1 + f) = head;
    pi.segment(1 + f, f) = head.tail(f) * RM;
  } else {
    const Matrix ones_r = Vector::Ones(f) * RowVector::Unit(f, 0);
    const Matrix R = right_divide_by_identity_minus(b.A0, b.A1 + b.A0 * ones_r, "R");
    const Matrix K = boundary_matrix(b, b.A1 + R * b.A2);

    // Sum of the level multipliers applied to pi_1.
    Matrix level_sum = Matrix::Zero(f, f);
    Matrix power = Matrix::Identity(f, f);
    for (int level = 1; level <= M - 1; ++level) {
      level_sum += power;
      if (level < M - 1) power = power * R;
    }
    level_sum += power * RM;

    Vector w(1 + f);
    w(0) = 1.0;
    w.tail(f) = level_sum * Vector::Ones(f);
    const RowVector head = solve_boundary(K, w);
    pi.segment(0, 1 + f) = head;

    RowVector level = head.tail(f);
    for (int l = 2; l <= M - 1; ++l) {
      level = level * R;
      pi.segment(1 + static_cast<Eigen::Index>(l - 1) * f, f) = level;
    }
    pi.segment(1 + static_cast<Eigen::Index>(M - 1) * f, f) = level * RM;
  }
  return {clean_distribution(std::move(pi)), DistributionKind::stationary};
}

StateDistribution solve_pi_omega_dense(const NetworkConfig& cfg) {
  const auto probs = contact_probabilities(cfg);
  const Matrix P = assemble(build_blocks(Chain::P0, cfg, probs), cfg.M, cfg.f);
  const auto n = static_cast<std::size_t>(P.rows());

  // (P^T - I) pi^T = 0 with the last equation replaced by sum(pi) = 1.
  std::vector<std::vector<double>> a(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      a[i][j] = P(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) - (i == j ? 1.0 : 0.0);
    }
  }
  std::vector<double> rhs(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) a[n - 1][j] = 1.0;
  rhs[n - 1] = 1.0;

  RowVector pi = gauss_solve(std::move(a), std::move(rhs)).transpose();
  return {clean_distribution(std::move(pi)), DistributionKind::stationary};
}

double fixed_point_residual(const NetworkConfig& cfg, const StateDistribution& pi) {
  const auto probs = contact_probabilities(cfg);
  const Matrix P = assemble(build_blocks(Chain::P0, cfg, probs), cfg.M, cfg.f);
  return (pi.values * P - pi.values).lpNorm<Eigen::Infinity>();
}

double acceptance_probability(const NetworkConfig& cfg, const StateDistribution& pi) {
  const auto probs = contact_probabilities(cfg);
  const Matrix P1 = assemble(build_blocks(Chain::P1, cfg, probs), cfg.M, cfg.f);
  return cfg.lambda * (pi.values * P1).sum();
}

StateDistribution conditional_distribution(const NetworkConfig& cfg, const StateDistribution& pi) {
  if (!(cfg.lambda > 0.0)) {
    throw std::invalid_argument("lambda > 0 required for conditional distribution");
  }
  const auto probs = contact_probabilities(cfg);
  const Eigen::Index size = 1 + static_cast<Eigen::Index>(cfg.M) * cfg.f;
  if (pi.values.size() != size) throw std::invalid_argument("distribution size does not match config");

  const Matrix P2 = assemble(build_blocks(Chain::P2, cfg, probs), cfg.M, cfg.f);
  const double denom = acceptance_probability(cfg, pi);
  if (!(denom > 0.0)) throw SolverError("insertion has zero probability");
  RowVector values = (pi.values * P2) / denom;
  values(0) = 0.0;
  return {clean_distribution(std::move(values)), DistributionKind::conditional};
}

void write_distribution_csv(std::ostream& out, const StateDistribution& dist, const StateIndexing& indexing) {
  if (dist.values.size() != static_cast<Eigen::Index>(indexing.size())) {
    throw std::invalid_argument("distribution does not match the state indexing");
  }
  out << "state,level,phase,probability\n" << std::setprecision(17);
  for (std::size_t i = 0; i < indexing.size(); ++i) {
    const auto s = indexing.state(i);
    out << '"' << indexing.label(i) << "\"," << s.level << ',' << s.phase << ','
        << dist.values(static_cast<Eigen::Index>(i)) << '\n';
  }
}

}  // namespace srcdelay

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "halpern_vr/core.hpp"

namespace hvr {

/// min_{x in simplex} max_{y in simplex} <A x, y>.
///
/// A is m1 x m2. The stacked point is u = (x; y) with x in the m2-simplex
/// (one weight per column) and y in the m1-simplex (one per row), so that
/// F(u) = (A^T y; -A x) is well defined for rectangular A.
struct MatrixGame {
  Matrix A;

  std::size_t rows() const { return static_cast<std::size_t>(A.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(A.cols()); }
  std::size_t dimension() const { return rows() + cols(); }

  Vector operator_value(const Vector& u) const;
};

enum class SamplingMode { kUniform, kImportance };

/// A_ij = z_i (1 - exp(-theta |i - j|)), z ~ N(0, I) drawn from `rng`.
Matrix policeman_burglar_matrix(std::size_t m, double theta, RngStream& rng);

/**
 * Matrix game as a finite sum over n = m1 m2 index pairs xi = (i, j),
 * flattened as k = i m2 + j.
 *
 * The sampled oracle is F_xi(u) = ((1/q_i) A_{i:}^T y_i; -(1/q_j) A_{:j} x_j)
 * with P[xi] = q_i q_j, where q over rows and columns is either uniform or
 * proportional to squared row / column norms. The finite-sum component is
 * F_k = n q_k F_xi so that (1/n) sum_k F_k = F. G is the indicator of the
 * product of simplices, one component call costs (m1 + m2)/(2 m1 m2)
 * epochs, L is the expected Lipschitz constant of F_xi (||A||_F under
 * importance sampling) and L_F = ||A||_2 from 100 power iterations.
 */
ProblemInstance matrix_game_problem(const MatrixGame& game, SamplingMode mode);

/// Uniform strategies on both simplices.
Vector matrix_game_start(const MatrixGame& game);

/// sqrt(||x - P(x - A^T y)||^2 + ||y - P(y + A x)||^2).
double gradient_mapping_norm(const MatrixGame& game, const Vector& u);

/// Row / column importance weights ||A_{i:}||^2 / ||A||_F^2 and
/// ||A_{:j}||^2 / ||A||_F^2. Throws on a zero row or column.
std::vector<double> row_importance_weights(const Matrix& A);
std::vector<double> column_importance_weights(const Matrix& A);

/// Saddle function (1/2) x^T H x - h^T x - <A x - b, y> with the
/// anti-bidiagonal lower-bound matrix A, H = 2 A^T A, b = 1/4, h = e_m / 4.
struct QuadraticProgramInstance {
  Matrix A;
  Matrix H;
  Vector b;
  Vector h;

  std::size_t m() const { return static_cast<std::size_t>(A.rows()); }
  Vector operator_value(const Vector& u) const;
};

QuadraticProgramInstance ouyang_xu_instance(std::size_t m);

/**
 * The quadratic program as a row-wise finite sum with n = m components:
 *   F_i(u) = (2n A_i^T (A_i x) - h - n A_i^T y_i ; n e_i (A_i x) - b).
 * G = 0, uniform sampling, metric ||F(u)||, start u = 0.
 */
ProblemInstance ouyang_xu_problem(std::size_t m);

/// F(u) = (1/n) sum_i (M_i u + c_i) with G = 0 unless `resolvent` is given.
/// L defaults to sqrt((1/n) sum ||M_i||_2^2); L_F = ||mean M||_2.
ProblemInstance affine_finite_sum(std::string name, std::vector<Matrix> M, std::vector<Vector> c,
                                  std::optional<double> L = std::nullopt,
                                  std::optional<Vector> known_solution = std::nullopt);

/// F_i(u) = Q_i (u - u*) with Q_i = B_i^T B_i, Gaussian B_i, rescaled so that
/// max_i lambda_max(Q_i) = L_target. F is then 1/L_target-cocoercive on
/// average. u* ~ N(0, I).
ProblemInstance synthetic_cocoercive(std::size_t n, std::size_t d, double L_target,
                                     std::uint64_t seed);

/// F_i(u) = M_i (u - u*) with M_i = mu I + K_i + E_i, K_i skew and E_i
/// symmetric with sum_i E_i = 0. F is mu-strongly monotone (monotone for
/// mu = 0) while the components are not individually monotone.
ProblemInstance synthetic_affine(std::size_t n, std::size_t d, double mu, std::uint64_t seed);

/// ||A||_2 by power iteration on A^T A from a fixed start vector.
double power_iteration_norm(const Matrix& A, std::size_t iterations = 100);

/// Plain-text CSV, row-major, '.' decimal point, 17 significant digits.
void save_matrix_csv(const Matrix& A, const std::string& path);
Matrix load_matrix_csv(const std::string& path);

}  // namespace hvr

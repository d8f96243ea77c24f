#include "halpern_vr/problems.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <sstream>

#include "halpern_vr/simplex.hpp"

namespace hvr {

namespace {

double max_eigenvalue_symmetric(const Matrix& S) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(S, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().maxCoeff();
}

double spectral_norm(const Matrix& A) {
  if (A.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(A);
  return svd.singularValues()(0);
}

Matrix gaussian_matrix(std::size_t rows, std::size_t cols, RngStream& rng) {
  Matrix B(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  // Fill column-major in a fixed order so the draw sequence is explicit.
  for (Eigen::Index j = 0; j < B.cols(); ++j) {
    for (Eigen::Index i = 0; i < B.rows(); ++i) B(i, j) = rng.normal();
  }
  return B;
}

}  // namespace

// ---------------------------------------------------------------- matrix game

Vector MatrixGame::operator_value(const Vector& u) const {
  require_dimension(u, dimension(), "matrix game");
  const auto m1 = A.rows();
  const auto m2 = A.cols();
  Vector out(m1 + m2);
  out.head(m2) = A.transpose() * u.tail(m1);
  out.tail(m1) = -(A * u.head(m2));
  return out;
}

Matrix policeman_burglar_matrix(std::size_t m, double theta, RngStream& rng) {
  if (m < 1) throw InvalidArgument("policeman_burglar_matrix: m must be >= 1");
  const auto size = static_cast<Eigen::Index>(m);
  Vector z(size);
  for (Eigen::Index i = 0; i < size; ++i) z[i] = rng.normal();
  Matrix A(size, size);
  for (Eigen::Index i = 0; i < size; ++i) {
    for (Eigen::Index j = 0; j < size; ++j) {
      A(i, j) = z[i] * (1.0 - std::exp(-theta * static_cast<double>(std::abs(i - j))));
    }
  }
  return A;
}

std::vector<double> row_importance_weights(const Matrix& A) {
  const double frob2 = A.squaredNorm();
  std::vector<double> q(static_cast<std::size_t>(A.rows()));
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    const double r = A.row(i).squaredNorm();
    if (r == 0.0) {
      throw InvalidArgument("importance sampling: row " + std::to_string(i) + " of A is zero");
    }
    q[static_cast<std::size_t>(i)] = r / frob2;
  }
  return q;
}

std::vector<double> column_importance_weights(const Matrix& A) {
  const double frob2 = A.squaredNorm();
  std::vector<double> q(static_cast<std::size_t>(A.cols()));
  for (Eigen::Index j = 0; j < A.cols(); ++j) {
    const double c = A.col(j).squaredNorm();
    if (c == 0.0) {
      throw InvalidArgument("importance sampling: column " + std::to_string(j) + " of A is zero");
    }
    q[static_cast<std::size_t>(j)] = c / frob2;
  }
  return q;
}

double power_iteration_norm(const Matrix& A, std::size_t iterations) {
  if (A.size() == 0) return 0.0;
  Vector x = Vector::Ones(A.cols()) / std::sqrt(static_cast<double>(A.cols()));
  double estimate = 0.0;
  for (std::size_t t = 0; t < iterations; ++t) {
    Vector y = A.transpose() * (A * x);
    const double norm = y.norm();
    if (norm == 0.0) return 0.0;
    estimate = std::sqrt(norm);
    x = y / norm;
  }
  return estimate;
}

ProblemInstance matrix_game_problem(const MatrixGame& game, SamplingMode mode) {
  const std::size_t m1 = game.rows();
  const std::size_t m2 = game.cols();
  if (m1 == 0 || m2 == 0) throw InvalidArgument("matrix_game_problem: empty matrix");
  auto data = std::make_shared<const MatrixGame>(game);

  std::vector<double> q_rows, q_cols;
  double L = 0.0;
  if (mode == SamplingMode::kImportance) {
    q_rows = row_importance_weights(game.A);
    q_cols = column_importance_weights(game.A);
    L = game.A.norm();
  } else {
    q_rows.assign(m1, 1.0 / static_cast<double>(m1));
    q_cols.assign(m2, 1.0 / static_cast<double>(m2));
    const double row_max = game.A.rowwise().squaredNorm().maxCoeff();
    const double col_max = game.A.colwise().squaredNorm().maxCoeff();
    L = std::sqrt(std::max(static_cast<double>(m1) * row_max, static_cast<double>(m2) * col_max));
  }
  const std::size_t n = m1 * m2;
  std::vector<double> q_pairs(n);
  for (std::size_t i = 0; i < m1; ++i) {
    for (std::size_t j = 0; j < m2; ++j) q_pairs[i * m2 + j] = q_rows[i] * q_cols[j];
  }

  ProblemInstance p;
  p.name = "matrix-game";
  p.n = n;
  p.d = m1 + m2;
  p.eval_full = [data](const Vector& u) { return data->operator_value(u); };
  p.eval_component = [data, q_rows, q_cols, n, m2](std::size_t k, const Vector& u) -> Vector {
    const auto i = static_cast<Eigen::Index>(k / m2);
    const auto j = static_cast<Eigen::Index>(k % m2);
    const auto rows = data->A.rows();
    const auto cols = data->A.cols();
    const double nd = static_cast<double>(n);
    Vector out(rows + cols);
    // x block: n q_j A_{i:}^T y_i ; y block: -n q_i A_{:j} x_j
    out.head(cols) = (nd * q_cols[static_cast<std::size_t>(j)] * u[cols + i]) *
                     data->A.row(i).transpose();
    out.tail(rows) = (-nd * q_rows[static_cast<std::size_t>(i)] * u[j]) * data->A.col(j);
    return out;
  };
  p.resolvent_G = [m1, m2](double, const Vector& u) -> Vector {
    const auto c = static_cast<Eigen::Index>(m2);
    const auto r = static_cast<Eigen::Index>(m1);
    Vector out(c + r);
    out.head(c) = project_simplex(u.head(c));
    out.tail(r) = project_simplex(u.tail(r));
    return out;
  };
  p.L = L;
  p.L_F = power_iteration_norm(game.A, 100);
  p.component_cost =
      static_cast<double>(m1 + m2) / (2.0 * static_cast<double>(m1) * static_cast<double>(m2));
  p.sampling = SamplingDistribution(std::move(q_pairs));
  p.metric = [data](const Vector& u) { return gradient_mapping_norm(*data, u); };
  p.default_start = matrix_game_start(game);
  p.has_nontrivial_G = true;
  return p;
}

Vector matrix_game_start(const MatrixGame& game) {
  const auto c = static_cast<Eigen::Index>(game.cols());
  const auto r = static_cast<Eigen::Index>(game.rows());
  Vector u(c + r);
  u.head(c).setConstant(1.0 / static_cast<double>(c));
  u.tail(r).setConstant(1.0 / static_cast<double>(r));
  return u;
}

double gradient_mapping_norm(const MatrixGame& game, const Vector& u) {
  require_dimension(u, game.dimension(), "gradient_mapping_norm");
  const auto c = game.A.cols();
  const auto r = game.A.rows();
  const Vector x = u.head(c);
  const Vector y = u.tail(r);
  const Vector dx = x - project_simplex(x - game.A.transpose() * y);
  const Vector dy = y - project_simplex(y + game.A * x);
  return std::sqrt(dx.squaredNorm() + dy.squaredNorm());
}

// ---------------------------------------------------------- quadratic program

Vector QuadraticProgramInstance::operator_value(const Vector& u) const {
  const auto mm = A.rows();
  require_dimension(u, static_cast<std::size_t>(2 * mm), "quadratic program");
  const Vector x = u.head(mm);
  const Vector y = u.tail(mm);
  Vector out(2 * mm);
  out.head(mm) = H * x - h - A.transpose() * y;
  out.tail(mm) = A * x - b;
  return out;
}

QuadraticProgramInstance ouyang_xu_instance(std::size_t m) {
  if (m < 2) throw InvalidArgument("ouyang_xu_instance: m must be >= 2");
  const auto mm = static_cast<Eigen::Index>(m);
  QuadraticProgramInstance qp;
  qp.A = Matrix::Zero(mm, mm);
  // Row r (0-based) < m-1 holds (-1, 1)/4 at columns (m-2-r, m-1-r); the last
  // row holds 1/4 in the first column.
  for (Eigen::Index r = 0; r + 1 < mm; ++r) {
    qp.A(r, mm - 2 - r) = -0.25;
    qp.A(r, mm - 1 - r) = 0.25;
  }
  qp.A(mm - 1, 0) = 0.25;
  qp.H = 2.0 * qp.A.transpose() * qp.A;
  qp.b = Vector::Constant(mm, 0.25);
  qp.h = Vector::Zero(mm);
  qp.h[mm - 1] = 0.25;
  return qp;
}

ProblemInstance ouyang_xu_problem(std::size_t m) {
  auto qp = std::make_shared<const QuadraticProgramInstance>(ouyang_xu_instance(m));
  const auto mm = static_cast<Eigen::Index>(m);
  const double nd = static_cast<double>(m);

  ProblemInstance p;
  p.name = "ouyang-xu";
  p.n = m;
  p.d = 2 * m;
  p.eval_full = [qp](const Vector& u) { return qp->operator_value(u); };
  p.eval_component = [qp, mm, nd](std::size_t i, const Vector& u) -> Vector {
    const auto r = static_cast<Eigen::Index>(i);
    const auto a = qp->A.row(r);
    const double ax = a.dot(u.head(mm));
    Vector out(2 * mm);
    out.head(mm) = (2.0 * nd * ax - nd * u[mm + r]) * a.transpose() - qp->h;
    out.tail(mm) = -qp->b;
    out[mm + r] += nd * ax;
    return out;
  };
  p.resolvent_G = zero_G_resolvent();

  // Jacobian of F_i is U D P with orthonormal P, so ||J_i|| = ||U D|| where
  // U = [(2n a; n e_i), (-n a; 0)] and D = diag(||a||, 1).
  double mean_sq = 0.0;
  for (Eigen::Index r = 0; r < mm; ++r) {
    const double a2 = qp->A.row(r).squaredNorm();
    const double an = std::sqrt(a2);
    Eigen::Matrix2d gram;
    const double c11 = (4.0 * nd * nd * a2 + nd * nd) * a2;
    const double c12 = -2.0 * nd * nd * a2 * an;
    const double c22 = nd * nd * a2;
    gram << c11, c12, c12, c22;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(gram, Eigen::EigenvaluesOnly);
    mean_sq += es.eigenvalues().maxCoeff();
  }
  p.L = std::sqrt(mean_sq / nd);

  Matrix J(2 * mm, 2 * mm);
  J << qp->H, -qp->A.transpose(), qp->A, Matrix::Zero(mm, mm);
  Vector c(2 * mm);
  c << -qp->h, -qp->b;
  p.L_F = std::sqrt(max_eigenvalue_symmetric(J.transpose() * J));
  // F(u*) = 0  <=>  A x = b and H x - h - A^T y = 0.
  Eigen::PartialPivLU<Matrix> lu(qp->A);
  const Vector x_star = lu.solve(qp->b);
  const Vector y_star = qp->A.transpose().partialPivLu().solve(qp->H * x_star - qp->h);
  Vector u_star(2 * mm);
  u_star << x_star, y_star;
  p.known_solution = u_star;
  p.affine = AffineForm{std::move(J), std::move(c)};
  p.component_cost = 1.0 / nd;
  p.sampling = SamplingDistribution::uniform(m);
  p.metric = [qp](const Vector& u) { return qp->operator_value(u).norm(); };
  p.default_start = Vector::Zero(2 * mm);
  return p;
}

// ------------------------------------------------------------ affine families

ProblemInstance affine_finite_sum(std::string name, std::vector<Matrix> M, std::vector<Vector> c,
                                  std::optional<double> L, std::optional<Vector> known_solution) {
  if (M.empty() || M.size() != c.size()) {
    throw InvalidArgument("affine_finite_sum: need matching, nonempty component lists");
  }
  const std::size_t n = M.size();
  const auto d = M.front().rows();
  Matrix M_mean = Matrix::Zero(d, d);
  Vector c_mean = Vector::Zero(d);
  double mean_sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (M[i].rows() != d || M[i].cols() != d || c[i].size() != d) {
      throw DimensionMismatch("affine_finite_sum: component " + std::to_string(i) +
                              " has inconsistent shape");
    }
    M_mean += M[i];
    c_mean += c[i];
    const double s = spectral_norm(M[i]);
    mean_sq += s * s;
  }
  M_mean /= static_cast<double>(n);
  c_mean /= static_cast<double>(n);

  auto parts = std::make_shared<const std::pair<std::vector<Matrix>, std::vector<Vector>>>(
      std::move(M), std::move(c));
  ProblemInstance p;
  p.name = std::move(name);
  p.n = n;
  p.d = static_cast<std::size_t>(d);
  p.eval_full = [M_mean, c_mean](const Vector& u) -> Vector { return M_mean * u + c_mean; };
  p.eval_component = [parts](std::size_t i, const Vector& u) -> Vector {
    return parts->first[i] * u + parts->second[i];
  };
  p.resolvent_G = zero_G_resolvent();
  p.L = L ? *L : std::sqrt(mean_sq / static_cast<double>(n));
  p.L_F = spectral_norm(M_mean);
  if (!(p.L > 0.0)) p.L = 1.0;  // F = 0: any positive modulus is valid
  p.component_cost = 1.0 / static_cast<double>(n);
  p.sampling = SamplingDistribution::uniform(n);
  p.known_solution = std::move(known_solution);
  p.affine = AffineForm{M_mean, c_mean};
  p.default_start = Vector::Zero(d);
  return p;
}

ProblemInstance synthetic_cocoercive(std::size_t n, std::size_t d, double L_target,
                                     std::uint64_t seed) {
  if (n < 1 || d < 1) throw InvalidArgument("synthetic_cocoercive: n and d must be >= 1");
  if (!(L_target > 0.0)) throw InvalidArgument("synthetic_cocoercive: L must be positive");
  RngStream rng(seed);
  std::vector<Matrix> Q;
  Q.reserve(n);
  double largest = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Matrix B = gaussian_matrix(d, d, rng);
    Matrix Qi = B.transpose() * B;
    largest = std::max(largest, max_eigenvalue_symmetric(Qi));
    Q.push_back(std::move(Qi));
  }
  const Vector u_star = random_vector(d, rng);
  std::vector<Vector> c;
  c.reserve(n);
  for (auto& Qi : Q) {
    Qi *= L_target / largest;
    c.push_back(-(Qi * u_star));
  }
  return affine_finite_sum("synthetic-coco", std::move(Q), std::move(c), L_target, u_star);
}

ProblemInstance synthetic_affine(std::size_t n, std::size_t d, double mu, std::uint64_t seed) {
  if (n < 1 || d < 1) throw InvalidArgument("synthetic_affine: n and d must be >= 1");
  if (!(mu >= 0.0)) throw InvalidArgument("synthetic_affine: mu must be nonnegative");
  RngStream rng(seed);
  const auto dd = static_cast<Eigen::Index>(d);
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  std::vector<Matrix> M;
  M.reserve(n);
  std::vector<Matrix> E;
  E.reserve(n);
  Matrix E_mean = Matrix::Zero(dd, dd);
  for (std::size_t i = 0; i < n; ++i) {
    const Matrix C = scale * gaussian_matrix(d, d, rng);
    const Matrix S = 0.5 * scale * gaussian_matrix(d, d, rng);
    M.push_back(mu * Matrix::Identity(dd, dd) + (C - C.transpose()));
    E.push_back(S + S.transpose());
    E_mean += E.back();
  }
  E_mean /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) M[i] += E[i] - E_mean;
  const Vector u_star = random_vector(d, rng);
  std::vector<Vector> c;
  c.reserve(n);
  for (const auto& Mi : M) c.push_back(-(Mi * u_star));
  return affine_finite_sum(mu > 0.0 ? "synthetic-strongly-monotone" : "synthetic-monotone",
                           std::move(M), std::move(c), std::nullopt, u_star);
}

// ------------------------------------------------------------------ CSV matrix

void save_matrix_csv(const Matrix& A, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_matrix_csv: cannot open '" + path + "'");
  char buf[32];
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", A(i, j));
      if (j > 0) out << ',';
      out << buf;
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("save_matrix_csv: write failed for '" + path + "'");
}

Matrix load_matrix_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_matrix_csv: cannot open '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream fields(line);
    std::string field;
    while (std::getline(fields, field, ',')) {
      char* end = nullptr;
      errno = 0;
      const double value = std::strtod(field.c_str(), &end);
      if (end == field.c_str() || *end != '\0' || errno == ERANGE) {
        throw InvalidArgument("load_matrix_csv: bad number '" + field + "' on line " +
                              std::to_string(line_no) + " of '" + path + "'");
      }
      row.push_back(value);
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw InvalidArgument("load_matrix_csv: ragged row on line " + std::to_string(line_no));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InvalidArgument("load_matrix_csv: '" + path + "' is empty");
  Matrix A(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return A;
}

}  // namespace hvr

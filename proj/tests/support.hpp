#pragma once

#include <cmath>
#include <vector>

#include "halpern_vr/core.hpp"
#include "halpern_vr/problems.hpp"
#include "halpern_vr/simplex.hpp"

namespace hvr::test {

inline Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

inline Matrix scalar_matrix(double a) { return Matrix::Constant(1, 1, a); }

/// F(u) = a u on R with one component, G = 0.
inline ProblemInstance scalar_problem(double a = 1.0, double L = 1.0) {
  return affine_finite_sum("scalar", {scalar_matrix(a)}, {Vector::Zero(1)}, L, Vector::Zero(1));
}

/// F = 0 with n components in R^d, G = 0.
inline ProblemInstance zero_problem(std::size_t n, std::size_t d) {
  std::vector<Matrix> M(n, Matrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d)));
  std::vector<Vector> c(n, Vector::Zero(static_cast<Eigen::Index>(d)));
  return affine_finite_sum("zero", M, c, 1.0);
}

/// Arbitrary (not necessarily monotone) affine components with Gaussian
/// entries, for estimator algebra.
inline ProblemInstance random_affine(std::size_t n, std::size_t d, std::uint64_t seed) {
  RngStream rng(seed);
  const auto dd = static_cast<Eigen::Index>(d);
  std::vector<Matrix> M;
  std::vector<Vector> c;
  for (std::size_t i = 0; i < n; ++i) {
    Matrix m(dd, dd);
    for (Eigen::Index r = 0; r < dd; ++r)
      for (Eigen::Index s = 0; s < dd; ++s) m(r, s) = rng.normal();
    M.push_back(m);
    c.push_back(random_vector(d, rng));
  }
  return affine_finite_sum("random-affine", M, c);
}

/// Projection onto the simplex in R^d as G's resolvent.
inline void attach_simplex(ProblemInstance& p) {
  p.resolvent_G = [](double, const Vector& u) { return project_simplex(u); };
  p.has_nontrivial_G = true;
}

inline double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace hvr::test

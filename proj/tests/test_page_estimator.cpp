#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "halpern_vr/page_estimator.hpp"
#include "support.hpp"

using namespace hvr;
using hvr::test::vec;

namespace {

// Exact variance of a without-replacement batch mean of the increments,
// centred form: (n-b)/(b(n-1)) (1/n) sum ||D_i - mean D||^2.
double batch_variance(const ProblemInstance& p, const Vector& a, const Vector& u, std::size_t b) {
  const std::size_t n = p.n;
  if (n == 1) return 0.0;
  std::vector<Vector> D;
  Vector mean = Vector::Zero(p.d);
  for (std::size_t i = 0; i < n; ++i) {
    D.push_back(p.F_component(i, u) - p.F_component(i, a));
    mean += D.back();
  }
  mean /= double(n);
  double s = 0.0;
  for (const auto& x : D) s += (x - mean).squaredNorm();
  return double(n - b) / (double(b) * double(n - 1)) * s / double(n);
}

double lemma_a1_rhs(const PageState& st, const ProblemInstance& p, const Vector& u, double prob) {
  const std::size_t n = p.n, b = st.batch_size;
  double spread = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    spread += (p.F_component(i, u) - p.F_component(i, st.anchor)).squaredNorm();
  }
  const double factor = n == 1 ? 0.0 : double(n - b) / (double(b) * double(n - 1));
  return (1.0 - prob) * (st.estimate - p.F(st.anchor)).squaredNorm() +
         (1.0 - prob) * factor * spread / double(n);
}

}  // namespace

TEST_SUITE("page_estimator") {

TEST_CASE("full initialisation") {
  SUBCASE("zero operator") {
    auto p = hvr::test::zero_problem(3, 2);
    EvalCounter c(3, 1.0 / 3);
    const auto st = page_init_full(p, vec({1.0, -1.0}), 1, c);
    CHECK(st.estimate.isZero(0.0));
    CHECK(c.full_evals() == 1);
  }
  SUBCASE("identity operator") {
    auto p = hvr::test::scalar_problem();
    EvalCounter c(1, 1.0);
    CHECK(page_init_full(p, vec({2.0}), 1, c).estimate[0] == 2.0);
  }
  SUBCASE("mean of three affine components") {
    auto p = hvr::test::random_affine(3, 4, 8);
    RngStream rng(1);
    const Vector u = random_vector(4, rng);
    EvalCounter c(3, 1.0 / 3);
    const auto st = page_init_full(p, u, 1, c);
    const Vector avg = (p.F_component(0, u) + p.F_component(1, u) + p.F_component(2, u)) / 3.0;
    CHECK((st.estimate - avg).lpNorm<Eigen::Infinity>() <= 1e-14);
    CHECK(st.anchor == u);
  }
  SUBCASE("dimension mismatch") {
    auto p = hvr::test::scalar_problem();
    EvalCounter c(1, 1.0);
    CHECK_THROWS_AS(page_init_full(p, vec({1.0, 2.0}), 1, c), DimensionMismatch);
  }
}

TEST_CASE("update branches") {
  auto p = hvr::test::random_affine(4, 3, 21);
  RngStream rng(3);
  const Vector a = random_vector(3, rng), u = random_vector(3, rng);
  EvalCounter c(4, 0.25);

  SUBCASE("p = 1 gives the exact operator value") {
    auto st = page_init_full(p, a, 2, c);
    st.estimate += vec({1.0, 1.0, 1.0});  // stale estimate is discarded
    page_update(st, p, u, 1.0, rng, c);
    CHECK((st.estimate - p.F(u)).norm() == 0.0);
    CHECK(c.full_evals() == 2);
    CHECK(st.anchor == u);
  }
  SUBCASE("full batch telescopes to the exact value") {
    auto st = page_init_full(p, a, 4, c);
    page_update(st, p, u, 0.0, rng, c);
    CHECK((st.estimate - p.F(u)).norm() <= 1e-13);
    CHECK(c.component_calls() == 8);
    CHECK(c.epochs() == doctest::Approx(1.0 + 2.0));
  }
  SUBCASE("invalid probability") {
    auto st = page_init_full(p, a, 1, c);
    CHECK_THROWS_AS(page_update(st, p, u, 1.5, rng, c), InvalidArgument);
  }
  SUBCASE("same seed gives identical branch decisions and batches") {
    RngStream r1(77), r2(77);
    auto s1 = page_init_full(p, a, 2, c), s2 = page_init_full(p, a, 2, c);
    for (int t = 0; t < 50; ++t) {
      const Vector next = random_vector(3, rng);
      page_update(s1, p, next, 0.3, r1, c);
      page_update(s2, p, next, 0.3, r2, c);
      REQUIRE(s1.estimate == s2.estimate);
    }
  }
}

TEST_CASE("enumerated expectation of a scalar n=3, b=1 update") {
  // F_i(u) = a_i u + c_i, hand values.
  auto p = affine_finite_sum("s3",
                             {hvr::test::scalar_matrix(1.0), hvr::test::scalar_matrix(2.0),
                              hvr::test::scalar_matrix(-0.5)},
                             {vec({0.5}), vec({-1.0}), vec({0.25})});
  PageState st{vec({0.3}), vec({1.0}), 1};
  const Vector u = vec({2.0});
  const double prob = 0.4;
  const auto mom = enumerate_update_expectation(st, p, u, prob);
  // F(u) = (2.5/3) u - 0.25/3.
  const double Fu = 2.5 / 3.0 * 2.0 - 0.25 / 3.0, Fa = 2.5 / 3.0 - 0.25 / 3.0;
  CHECK(mom.mean[0] == doctest::Approx(prob * Fu + (1 - prob) * (0.3 + Fu - Fa)).epsilon(1e-14));
  // Three equally likely outcomes 0.3 + a_i (u - anchor).
  double second = 0.0;
  for (double ai : {1.0, 2.0, -0.5}) second += std::pow(0.3 + ai - Fu, 2) / 3.0;
  CHECK(mom.error_second_moment == doctest::Approx((1 - prob) * second).epsilon(1e-13));
}

TEST_CASE("enumeration edge cases") {
  auto p = hvr::test::random_affine(4, 2, 5);
  RngStream rng(6);
  const Vector a = random_vector(2, rng), u = random_vector(2, rng);
  PageState st{random_vector(2, rng), a, 2};
  CHECK(enumerate_update_expectation(st, p, u, 1.0).error_second_moment == 0.0);

  SUBCASE("identical components leave only the propagated error") {
    const Matrix M = Matrix::Random(2, 2);
    auto same = affine_finite_sum("same", {M, M, M, M}, std::vector<Vector>(4, vec({1.0, 2.0})));
    const double prob = 0.3;
    const auto mom = enumerate_update_expectation(st, same, u, prob);
    const double propagated = (st.estimate - same.F(a)).squaredNorm();
    CHECK(mom.error_second_moment == doctest::Approx((1 - prob) * propagated).epsilon(1e-12));
  }
  SUBCASE("too large to enumerate") {
    auto big = hvr::test::random_affine(9, 2, 5);
    PageState sb{Vector::Zero(2), a, 1};
    CHECK_THROWS_AS(enumerate_update_expectation(sb, big, u, 0.5), InvalidArgument);
  }
}

TEST_CASE("unbiasedness and Lemma A.1 on enumerable instances") {
  for (std::size_t n : {1u, 2u, 3u, 4u, 5u, 8u}) {
    for (std::size_t b = 1; b <= std::min<std::size_t>(n, 3); ++b) {
      auto p = hvr::test::random_affine(n, 3, 100 + n * 10 + b);
      RngStream rng(n * 31 + b);
      const Vector a = random_vector(3, rng), u = random_vector(3, rng);
      const PageState st{random_vector(3, rng), a, b};
      for (double prob : {0.0, 0.2, 0.7}) {
        CAPTURE(n);
        CAPTURE(b);
        CAPTURE(prob);
        const auto mom = enumerate_update_expectation(st, p, u, prob);
        const Vector mixture = prob * p.F(u) + (1 - prob) * (st.estimate + p.F(u) - p.F(a));
        CHECK((mom.mean - mixture).lpNorm<Eigen::Infinity>() <= 1e-14 * (1 + mixture.norm()));
        // Exact second moment: propagated error plus the batch variance.
        const double exact = (1 - prob) * ((st.estimate - p.F(a)).squaredNorm() +
                                           batch_variance(p, a, u, b));
        CHECK(mom.error_second_moment == doctest::Approx(exact).epsilon(1e-12));
        CHECK(mom.error_second_moment <= lemma_a1_rhs(st, p, u, prob) * (1 + 1e-12));
      }
    }
  }
}

TEST_CASE("Monte Carlo mean of the update agrees with the enumeration") {
  auto p = hvr::test::random_affine(5, 2, 44);
  RngStream rng(45);
  const Vector a = random_vector(2, rng), u = random_vector(2, rng);
  const PageState st{random_vector(2, rng), a, 2};
  const double prob = 0.35;
  const auto mom = enumerate_update_expectation(st, p, u, prob);
  Vector acc = Vector::Zero(2);
  const int N = 40000;
  EvalCounter c(5, 0.2);
  for (int t = 0; t < N; ++t) {
    PageState s = st;
    page_update(s, p, u, prob, rng, c);
    acc += s.estimate;
  }
  acc /= double(N);
  CHECK((acc - mom.mean).norm() < 0.05 * (1 + mom.mean.norm()));
  // Expected charge per update: p full + (1-p) 2b components.
  const double expected_epochs = N * (prob + (1 - prob) * 4 * 0.2);
  CHECK(std::abs(c.epochs() - expected_epochs) < 0.02 * expected_epochs);
}

}  // TEST_SUITE

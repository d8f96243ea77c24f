#include <doctest.h>

#include <cmath>

#include "halpern_vr/inexact_halpern.hpp"
#include "support.hpp"

using namespace hvr;
using hvr::test::vec;

TEST_SUITE("inexact_halpern") {

TEST_CASE("outer weights") {
  CHECK(outer_lambda(0) == 0.5);
  CHECK(outer_lambda(8) == doctest::Approx(0.1));
  for (std::size_t k = 0; k < 50; ++k) REQUIRE(outer_lambda(k + 1) < outer_lambda(k));
}

TEST_CASE("inner iteration counts") {
  CHECK(inner_iteration_count(0, 4, 2.0, 1.0, InnerSchedule::kTheoretical) == 309);
  CHECK(inner_iteration_count(0, 100, 1.0, 1.0, InnerSchedule::kPractical, 0.05) == 3);
  CHECK(inner_iteration_count(0, 2, 1.0, 1.0, InnerSchedule::kPractical, 0.05) == 1);
  for (std::size_t k = 0; k < 30; ++k) {
    REQUIRE(inner_iteration_count(k, 3, 1.0, 1.0, InnerSchedule::kPractical) >= 1);
  }
  CHECK(post_process_iterations(4) == 1092);
}

TEST_CASE("subproblem operator") {
  auto p = synthetic_affine(5, 4, 0.0, 21);
  RngStream rng(1);
  const Vector anchor = random_vector(4, rng);
  const double eta = 0.8;
  const auto op = make_subproblem_operator(p, anchor, eta, p.L);
  CHECK(op.L_A == doctest::Approx(eta * p.L + 1));
  CHECK(op.mu == 1.0);
  double worst_sum = 0.0, worst_mono = 1e300;
  for (int t = 0; t < 100; ++t) {
    const Vector a = random_vector(4, rng), b = random_vector(4, rng);
    Vector avg = Vector::Zero(4);
    for (std::size_t i = 0; i < 5; ++i) avg += op.A_component(i, a);
    worst_sum = std::max(worst_sum, (avg / 5.0 - op.A_full(a)).norm());
    const double excess = (op.A_full(a) - op.A_full(b)).dot(a - b) - (a - b).squaredNorm();
    worst_mono = std::min(worst_mono, excess);
  }
  CHECK(worst_sum <= 1e-10);
  CHECK(worst_mono >= -1e-8);
}

TEST_CASE("outer step") {
  MonotoneHalpernConfig cfg;
  cfg.L = 1.0;
  SUBCASE("zero operator") {
    auto p = hvr::test::zero_problem(3, 2);
    const Vector u0 = vec({1.0, 0.0});
    auto st = monotone_initial_state(p, u0, cfg);
    st.u = vec({3.0, 3.0});
    const Vector expect = 0.5 * u0 + 0.5 * st.u;
    outer_step(st, p, cfg);
    CHECK((st.u - expect).norm() <= 1e-14);
  }
  SUBCASE("solution is a fixed point") {
    auto p = synthetic_affine(4, 3, 0.0, 2);
    cfg.L = p.L;
    auto st = monotone_initial_state(p, *p.known_solution, cfg);
    for (int t = 0; t < 5; ++t) outer_step(st, p, cfg);
    CHECK((st.u - *p.known_solution).norm() <= 1e-10);
  }
  SUBCASE("long inner runs match the closed-form resolvent") {
    auto p = synthetic_affine(4, 3, 0.0, 5);
    cfg.L = p.L;
    cfg.inner_schedule = InnerSchedule::kPractical;
    cfg.c0 = 4000.0;  // thousands of inner iterations
    const Vector u0 = Vector::Ones(3);
    auto st = monotone_initial_state(p, u0, cfg);
    st.u = vec({0.5, -1.0, 2.0});
    const double eta = cfg.step(p.n);
    const Vector expect = outer_lambda(0) * u0 + (1 - outer_lambda(0)) *
                                                     exact_resolvent_affine(p, eta, st.u);
    outer_step(st, p, cfg);
    CHECK((st.u - expect).norm() <= 1e-6);
  }
}

TEST_CASE("exact resolvent of an affine operator") {
  SUBCASE("zero operator") {
    auto p = hvr::test::zero_problem(1, 3);
    CHECK(exact_resolvent_affine(p, 1.0, vec({1.0, 2.0, 3.0})) == vec({1.0, 2.0, 3.0}));
  }
  SUBCASE("scalar") {
    auto p = hvr::test::scalar_problem();
    CHECK(exact_resolvent_affine(p, 1.0, vec({2.0}))[0] == doctest::Approx(1.0));
  }
  SUBCASE("round trip on a random monotone operator") {
    auto p = synthetic_affine(3, 5, 0.0, 8);
    RngStream rng(4);
    for (int t = 0; t < 10; ++t) {
      const Vector u = random_vector(5, rng);
      const Vector v = exact_resolvent_affine(p, 1.3, u);
      REQUIRE((v + 1.3 * p.F(v) - u).norm() <= 1e-12 * (1 + u.norm()));
    }
  }
  SUBCASE("rejects nontrivial G") {
    auto p = hvr::test::scalar_problem();
    hvr::test::attach_simplex(p);
    CHECK_THROWS_AS(exact_resolvent_affine(p, 1.0, vec({1.0})), InvalidArgument);
  }
}

TEST_CASE("P^eta and the residual conversion") {
  CHECK(p_eta_norm(vec({1.0, 1.0}), vec({0.0, 0.0})) == doctest::Approx(std::sqrt(2.0)));
  auto p = synthetic_affine(4, 6, 0.0, 31);
  const Vector star = *p.known_solution;
  CHECK(p_eta_norm(star, exact_resolvent_affine(p, 2.0, star)) <= 1e-12);
  {
    const auto r = convert_to_residual_point(p, 2.0, star, exact_resolvent_affine(p, 2.0, star));
    CHECK(r.residual <= 1e-12);
  }
  RngStream rng(3);
  for (double eta : {0.1, 1.0, 2.0, 7.5}) {
    for (int t = 0; t < 10; ++t) {
      const Vector u = random_vector(6, rng);
      const Vector v = exact_resolvent_affine(p, eta, u);
      const auto r = convert_to_residual_point(p, eta, u, v);
      REQUIRE(r.residual == doctest::Approx(p_eta_norm(u, v) / eta).epsilon(1e-12));
    }
  }
  // eta = 2 with ||P|| = 0.02 gives res = 0.01: pick u = v + eta F(v) with ||eta F(v)|| = 0.02.
  const Vector v = star + 1e-3 * Vector::Ones(6);
  Vector Fv = p.F(v);
  const double scale = 0.01 / Fv.norm();
  const Vector v2 = star + scale * 1e-3 * Vector::Ones(6);
  const Vector u = v2 + 2.0 * p.F(v2);
  CHECK(p_eta_norm(u, exact_resolvent_affine(p, 2.0, u)) == doctest::Approx(0.02).epsilon(1e-9));
  CHECK(convert_to_residual_point(p, 2.0, u, exact_resolvent_affine(p, 2.0, u)).residual ==
        doctest::Approx(0.01).epsilon(1e-9));
}

TEST_CASE("VR-FoRB resolvent approximation matches the exact P^eta") {
  auto p = synthetic_affine(4, 4, 0.0, 9);
  MonotoneHalpernConfig cfg;
  cfg.L = p.L;
  const double eta = cfg.step(p.n);
  const Vector u = vec({1.0, -1.0, 0.5, 2.0});
  const auto op = make_subproblem_operator(p, u, eta, cfg.L);
  RngStream rng(4);
  EvalCounter c(4, 0.25);
  const Vector approx = run_forb(u, 200000, op, p.sampling, rng, c);
  const Vector exact = exact_resolvent_affine(p, eta, u);
  CHECK(std::abs(p_eta_norm(u, approx) - p_eta_norm(u, exact)) <= 1e-5);
}

TEST_CASE("post-processing") {
  auto p = synthetic_affine(4, 3, 0.0, 14);
  MonotoneHalpernConfig cfg;
  cfg.L = p.L;
  RngStream rng(1);
  EvalCounter c(4, 0.25);
  const Vector out = post_process(p, *p.known_solution, cfg, rng, c);
  CHECK((out - *p.known_solution).norm() <= 1e-8);
  CHECK(c.resolvent_calls() == 1092);
}

TEST_CASE("inexactness criterion and bounded iterates at the theoretical schedule") {
  auto p = synthetic_affine(4, 6, 0.0, 77);
  MonotoneHalpernConfig cfg;
  cfg.L = p.L;
  cfg.inner_schedule = InnerSchedule::kTheoretical;
  const double eta = cfg.step(p.n);
  const Vector u0 = Vector::Zero(6);
  const Vector star = *p.known_solution;
  const double d0 = (u0 - star).squaredNorm();
  const int seeds = 20, K = 5;
  std::vector<double> err(K + 1, 0.0), target(K + 1, 0.0), dist(K + 1, 0.0);
  for (int s = 0; s < seeds; ++s) {
    cfg.seed = static_cast<std::uint64_t>(s);
    auto st = monotone_initial_state(p, u0, cfg);
    for (int k = 0; k <= K; ++k) {
      const Vector exact = exact_resolvent_affine(p, eta, st.u);
      const double P = p_eta_norm(st.u, exact);
      outer_step(st, p, cfg);
      err[k] += (st.last_resolvent - exact).squaredNorm() / seeds;
      target[k] += P * P / std::pow(k + 2.0, 8) / seeds;
      dist[k] += (st.u - star).squaredNorm() / seeds;
    }
  }
  for (int k = 0; k <= K; ++k) {
    CAPTURE(k);
    CHECK(err[k] <= target[k] * 1.5);
    CHECK(dist[k] <= 2 * d0 * 1.1);
  }
}

TEST_CASE("run bookkeeping") {
  MonotoneHalpernConfig cfg;
  SUBCASE("one outer step") {
    auto p = synthetic_affine(4, 3, 0.0, 1);
    cfg.L = p.L;
    cfg.control.max_iters = 1;
    const auto r = run_monotone_halpern(p, Vector::Ones(3), cfg);
    REQUIRE(r.trace.size() == 1);
    CHECK(r.trace[0].iter == 1);
    const double eta = cfg.step(p.n);
    CHECK(r.trace[0].residual_metric ==
          doctest::Approx(p_eta_norm(Vector::Ones(3), r.state.last_resolvent) / eta));
  }
  SUBCASE("zero operator keeps u0") {
    auto p = hvr::test::zero_problem(3, 2);
    cfg.control.max_iters = 10;
    const auto r = run_monotone_halpern(p, vec({0.3, -0.7}), cfg);
    CHECK((r.state.u - vec({0.3, -0.7})).norm() <= 1e-15);
  }
  SUBCASE("epochs match the hand count") {
    auto p = synthetic_affine(8, 3, 0.0, 3);
    cfg.L = p.L;
    cfg.control.max_iters = 10;
    const auto r = run_monotone_halpern(p, Vector::Ones(3), cfg);
    const auto& c = r.state.counter;
    std::size_t inner = 0;
    for (std::size_t k = 0; k < 10; ++k) {
      inner += inner_iteration_count(k, 8, cfg.step(8), p.L, cfg.inner_schedule, cfg.c0);
    }
    CHECK(c.component_calls() == 2 * inner);
    CHECK(c.resolvent_calls() == inner);
    CHECK(c.full_evals() >= 10);
    CHECK(c.epochs() == doctest::Approx(double(c.full_evals()) + 2.0 * inner / 8.0));
  }
}

}  // TEST_SUITE

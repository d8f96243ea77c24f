#include <doctest.h>

#include <cmath>

#include "halpern_vr/halpern_coco.hpp"
#include "support.hpp"

using namespace hvr;
using hvr::test::vec;

TEST_SUITE("halpern_coco") {

TEST_CASE("lambda schedule") {
  CHECK(coco_lambda(1) == doctest::Approx(0.4));
  CHECK(coco_lambda(6) == doctest::Approx(0.2));
  const double eps = 1e-3;
  CHECK(coco_lambda(static_cast<std::size_t>(2.0 / eps - 4.0) + 1) < eps);
  for (std::size_t k = 1; k < 100; ++k) REQUIRE(coco_lambda(k + 1) < coco_lambda(k));
  CHECK_THROWS_AS(coco_lambda(0), InvalidArgument);
}

TEST_CASE("refresh probability schedule") {
  CHECK(coco_p(2, 16) == doctest::Approx(4.0 / 7.0));
  CHECK(coco_p(4, 16) == doctest::Approx(4.0 / 9.0));
  CHECK(coco_p(10, 16) == doctest::Approx(4.0 / 9.0));
  for (std::size_t k = 1; k < 10; ++k) CHECK(coco_p(k, 1) == doctest::Approx(4.0 / 6.0));
  // Non-square n: the branch switches at the real square root.
  CHECK(coco_p(3, 10) == doctest::Approx(4.0 / 8.0));
  CHECK(coco_p(4, 10) == doctest::Approx(4.0 / (std::sqrt(10.0) + 5.0)));
}

TEST_CASE("batch size and potential weight") {
  CHECK(coco_batch_size(1) == 1);
  CHECK(coco_batch_size(16) == 4);
  CHECK(coco_batch_size(17) == 5);
  CHECK(coco_batch_size(250000) == 500);
  CHECK(coco_potential_weight(1, 4, 1.0) == doctest::Approx(5.0));
}

TEST_CASE("initial step") {
  CocoHalpernConfig cfg;
  cfg.L = 1.0;
  SUBCASE("zero operator keeps u0") {
    auto p = hvr::test::zero_problem(2, 3);
    const Vector u0 = vec({1.0, 2.0, 3.0});
    auto st = coco_initial_step(p, u0, cfg);
    CHECK(st.u == u0);
  }
  SUBCASE("scalar identity operator") {
    auto p = hvr::test::scalar_problem();
    auto st = coco_initial_step(p, vec({1.0}), cfg);
    CHECK(cfg.eta() == 0.25);
    CHECK(st.u[0] == doctest::Approx(0.6875).epsilon(1e-15));
    CHECK(st.counter.full_evals() == 2);
    CHECK(st.counter.resolvent_calls() == 1);
    CHECK(st.page.estimate[0] == doctest::Approx(0.6875));
  }
  SUBCASE("starting at a constrained solution") {
    // F(u) = u - e_1 on the simplex in R^2: u* = e_1 with F(u*) = 0.
    auto p = affine_finite_sum("shift", {Matrix::Identity(2, 2)}, {vec({-1.0, 0.0})}, 1.0);
    hvr::test::attach_simplex(p);
    auto st = coco_initial_step(p, vec({1.0, 0.0}), cfg);
    CHECK((st.u - vec({1.0, 0.0})).norm() <= 1e-15);
  }
}

TEST_CASE("steps") {
  CocoHalpernConfig cfg;
  cfg.L = 1.0;
  SUBCASE("scalar recursion reaches 0.640625") {
    auto p = hvr::test::scalar_problem();
    auto st = coco_initial_step(p, vec({1.0}), cfg);
    coco_step(st, p, cfg);
    CHECK(st.k == 2);
    CHECK(st.u[0] == doctest::Approx(0.640625).epsilon(1e-15));
  }
  SUBCASE("zero operator gives convex combinations") {
    auto p = hvr::test::zero_problem(4, 2);
    const Vector u0 = vec({1.0, -1.0});
    auto st = coco_initial_step(p, u0, cfg);
    st.u = vec({3.0, 5.0});
    st.page.anchor = st.u;
    const Vector expect = 0.4 * u0 + 0.6 * st.u;
    coco_step(st, p, cfg);
    CHECK((st.u - expect).norm() <= 1e-15);
  }
  SUBCASE("solution is a fixed point") {
    auto p = synthetic_cocoercive(6, 3, 1.0, 9);
    const Vector star = *p.known_solution;
    auto st = coco_initial_step(p, star, cfg);
    for (int t = 0; t < 20; ++t) coco_step(st, p, cfg);
    CHECK((st.u - star).norm() <= 1e-12);
  }
}

TEST_CASE("potential") {
  CocoHalpernConfig cfg;
  cfg.L = 1.0;
  SUBCASE("zero at the solution when u0 = u*") {
    auto p = synthetic_cocoercive(4, 3, 1.0, 2);
    auto st = coco_initial_step(p, *p.known_solution, cfg);
    CHECK(std::abs(coco_potential(st, p, cfg)) <= 1e-20);
  }
  SUBCASE("n = 1 keeps the estimator exact and the potential nonincreasing") {
    auto p = hvr::test::scalar_problem(0.7, 1.0);
    auto st = coco_initial_step(p, vec({2.0}), cfg);
    double C = coco_potential(st, p, cfg);
    CHECK(C <= 1e-9);
    for (int t = 0; t < 100; ++t) {
      REQUIRE(std::abs(p.F(st.u)[0] - st.page.estimate[0]) <= 1e-14);
      const double lambda = coco_lambda(st.k);
      coco_step(st, p, cfg);
      const double next = coco_potential(st, p, cfg);
      REQUIRE(next <= (1 - lambda) * C + 1e-9 * (1 + std::abs(C)));
      C = next;
    }
  }
  SUBCASE("C_1 <= 0 on random instances") {
    for (std::uint64_t s = 0; s < 10; ++s) {
      auto p = synthetic_cocoercive(8, 4, 1.0, s);
      RngStream rng(s);
      auto st = coco_initial_step(p, random_vector(4, rng), cfg);
      CHECK(coco_potential(st, p, cfg) <= 1e-9);
    }
  }
}

TEST_CASE("mean potential decreases over seeds") {
  auto p = synthetic_cocoercive(8, 4, 1.0, 17);
  CocoHalpernConfig cfg;
  cfg.L = 1.0;
  const int seeds = 60, K = 30;
  std::vector<std::vector<double>> C(K + 1, std::vector<double>(seeds));
  const Vector u0 = Vector::Constant(4, 2.0);
  for (int s = 0; s < seeds; ++s) {
    cfg.seed = static_cast<std::uint64_t>(s);
    auto st = coco_initial_step(p, u0, cfg);
    for (int k = 1; k <= K; ++k) {
      C[k][s] = coco_potential(st, p, cfg);
      coco_step(st, p, cfg);
    }
  }
  for (int k = 1; k < K; ++k) {
    std::vector<double> diff(seeds);
    for (int s = 0; s < seeds; ++s) diff[s] = C[k + 1][s] - (1 - coco_lambda(k)) * C[k][s];
    const double m = hvr::test::mean(diff);
    double var = 0.0;
    for (double x : diff) var += (x - m) * (x - m);
    const double se = std::sqrt(var / (seeds - 1) / seeds);
    CAPTURE(k);
    CHECK(m <= 3 * se + 1e-12);
  }
}

TEST_CASE("run and trace") {
  CocoHalpernConfig cfg;
  cfg.L = 1.0;
  SUBCASE("max_iters = 1 logs u_1 only") {
    auto p = synthetic_cocoercive(4, 2, 1.0, 1);
    cfg.control.max_iters = 1;
    const auto r = run_coco_halpern(p, Vector::Ones(2), cfg);
    REQUIRE(r.trace.size() == 1);
    CHECK(r.trace[0].iter == 1);
    CHECK(r.trace[0].residual_metric == doctest::Approx(coco_residual(r.state, p)));
  }
  SUBCASE("scalar runs do not depend on the seed") {
    auto p = hvr::test::scalar_problem();
    cfg.control.max_iters = 50;
    cfg.seed = 1;
    const auto a = run_coco_halpern(p, vec({1.0}), cfg);
    cfg.seed = 99;
    const auto b = run_coco_halpern(p, vec({1.0}), cfg);
    REQUIRE(a.trace.size() == b.trace.size());
    for (std::size_t i = 0; i < a.trace.size(); ++i) {
      CHECK(a.trace[i].residual_metric == b.trace[i].residual_metric);
    }
  }
  SUBCASE("epochs match the hand count over 10 iterations") {
    auto p = synthetic_cocoercive(16, 3, 1.0, 4);
    cfg.control.max_iters = 11;
    const auto r = run_coco_halpern(p, Vector::Ones(3), cfg);
    const auto& c = r.state.counter;
    // F(u0) in the initial step plus one in page_init_full; every further
    // step is one full evaluation or 2b = 8 component calls.
    CHECK(c.full_evals() + c.component_calls() / 8 == 2 + 10);
    CHECK(c.component_calls() % 8 == 0);
    CHECK(c.epochs() == doctest::Approx(double(c.full_evals()) + c.component_calls() / 16.0));
    CHECK(c.resolvent_calls() == 11);
  }
  SUBCASE("epochs are nondecreasing and the budget stops the run") {
    auto p = synthetic_cocoercive(9, 3, 1.0, 4);
    cfg.control.max_iters = 100000;
    cfg.control.epoch_budget = 20.0;
    const auto r = run_coco_halpern(p, Vector::Ones(3), cfg);
    for (std::size_t i = 1; i < r.trace.size(); ++i) {
      REQUIRE(r.trace[i].oracle_epochs >= r.trace[i - 1].oracle_epochs);
    }
    CHECK(r.trace.back().oracle_epochs >= 20.0);
    CHECK(r.trace.back().oracle_epochs < 22.0);
  }
  SUBCASE("log stride") {
    auto p = synthetic_cocoercive(4, 2, 1.0, 1);
    cfg.control.max_iters = 25;
    cfg.control.log_stride = 10;
    const auto r = run_coco_halpern(p, Vector::Ones(2), cfg);
    std::vector<std::size_t> iters;
    for (const auto& t : r.trace) iters.push_back(t.iter);
    CHECK(iters == std::vector<std::size_t>{1, 11, 21, 25});
  }
  SUBCASE("divergence aborts") {
    auto p = hvr::test::scalar_problem(1.0, 1.0);
    cfg.eta_override = 50.0;
    cfg.control.max_iters = 200;
    CHECK_THROWS_AS(run_coco_halpern(p, vec({1.0}), cfg), NumericalDivergence);
  }
}

TEST_CASE("constrained iterates stay feasible and g certifies membership") {
  auto p = synthetic_cocoercive(6, 4, 1.0, 12);
  hvr::test::attach_simplex(p);
  CocoHalpernConfig cfg;
  cfg.L = 1.0;
  cfg.seed = 3;
  auto st = coco_initial_step(p, vec({0.25, 0.25, 0.25, 0.25}), cfg);
  const double first = cfg.eta() / (2 * coco_lambda(1));
  CHECK((p.resolvent(first, st.u + first * st.g) - st.u).norm() <= 1e-10);
  for (int t = 0; t < 40; ++t) {
    coco_step(st, p, cfg);
    REQUIRE(st.u.minCoeff() >= 0.0);
    REQUIRE(std::abs(st.u.sum() - 1.0) <= 1e-12);
    REQUIRE((p.resolvent(cfg.eta(), st.u + cfg.eta() * st.g) - st.u).norm() <= 1e-10);
  }
}

}  // TEST_SUITE
